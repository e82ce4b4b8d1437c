"""PC -> robot control link: one-hot control vectors over a line-framed TCP socket.

Request grammar: ``int ("," int)* "\\n"`` (ASCII). The mock robot answers
each request line with ``ACK <gesture name>\\n`` or ``ERR <reason>\\n``.
"""
import logging
import socket
import socketserver
import threading

from .errors import PreconditionError, ProtocolError, TransportError

log = logging.getLogger(__name__)

DEFAULT_PORT = 9559
MAX_LINE = 64 * 1024


def control_vector(class_idx, n):
    if n < 1:
        raise PreconditionError("control vector length must be >= 1")
    if not 1 <= class_idx <= n:
        raise PreconditionError(f"class index {class_idx} outside 1..{n}")
    return [1 if i == class_idx else 0 for i in range(1, n + 1)]


def encode(class_idx, n):
    """``encode(3, 6) == b"0,0,1,0,0,0\\n"``."""
    return (",".join(map(str, control_vector(class_idx, n))) + "\n").encode("ascii")


def decode(message):
    """1-based index of the single ``1`` in a one-hot line."""
    if isinstance(message, bytes):
        try:
            message = message.decode("ascii")
        except UnicodeDecodeError:
            raise ProtocolError("non-ASCII bytes") from None
    text = message.rstrip("\r\n")
    if not text.strip():
        raise ProtocolError("empty message")
    slots = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok.lstrip("-").isdigit():
            raise ProtocolError(f"non-integer token {tok!r}")
        slots.append(int(tok))
    if any(v not in (0, 1) for v in slots) or slots.count(1) != 1:
        raise ProtocolError("not one-hot")
    return slots.index(1) + 1


class GestureTable:
    """Ordered, unique gesture names; index 1 is the first entry."""

    def __init__(self, names):
        names = list(names)
        if not names:
            raise PreconditionError("gesture table is empty")
        if len(set(names)) != len(names):
            raise PreconditionError("gesture names must be unique")
        self.names = tuple(names)

    def __len__(self):
        return len(self.names)

    def name(self, class_idx):
        if not 1 <= class_idx <= len(self.names):
            raise ProtocolError(f"index {class_idx} outside table of {len(self.names)}")
        return self.names[class_idx - 1]


def respond(line, table):
    """Reply line (without newline) for one request line."""
    try:
        name = table.name(decode(line))
    except ProtocolError as exc:
        log.info("rejected %r: %s", line, exc.reason)
        return f"ERR {exc.reason}"
    log.info("PERFORM %s", name)
    return f"ACK {name}"


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        while True:
            line = self.rfile.readline(MAX_LINE)
            if not line:
                return
            reply = respond(line, self.server.table)
            self.wfile.write((reply + "\n").encode("utf-8"))
            self.wfile.flush()


class RobotServer(socketserver.ThreadingTCPServer):
    """Mock robot: logs ``PERFORM <name>`` for every valid control vector."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, table, host="127.0.0.1", port=DEFAULT_PORT):
        self.table = table if isinstance(table, GestureTable) else GestureTable(table)
        try:
            super().__init__((host, port), _Handler)
        except OSError as exc:
            raise TransportError(f"cannot bind {host}:{port}: {exc}") from exc

    @property
    def port(self):
        return self.server_address[1]

    def start_background(self):
        t = threading.Thread(target=self.serve_forever, name="robot-server", daemon=True)
        t.start()
        return t


def serve(port, table, host="0.0.0.0"):
    """Run the mock robot until interrupted."""
    with RobotServer(table, host, port) as server:
        log.info("robot server listening on %s:%d", host, server.port)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass


def send(host, port, class_idx, n, timeout=5.0):
    """Send one control vector and return the server's reply line (no newline)."""
    payload = encode(class_idx, n)  # raises before any connection on a bad index
    try:
        with socket.create_connection((host, port), timeout=timeout) as sock:
            sock.sendall(payload)
            with sock.makefile("rb") as fh:
                reply = fh.readline(MAX_LINE)
    except OSError as exc:
        raise TransportError(f"{host}:{port}: {exc}") from exc
    if not reply.endswith(b"\n"):
        raise TransportError(f"{host}:{port}: connection closed before a full reply")
    return reply.decode("utf-8").rstrip("\n")
