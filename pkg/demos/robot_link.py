"""One-hot control vectors to a mock robot over TCP.

    python3 demos/robot_link.py

Starts the mock robot on a free local port, sends a few recognised classes
and one malformed line, and shows the replies.
"""
import logging
import socket

from gesturebot import control_link, synth
from gesturebot.errors import PreconditionError

logging.basicConfig(level=logging.INFO, format="  robot log: %(message)s")

robot = control_link.RobotServer(synth.ALL_GESTURES, "127.0.0.1", 0)
robot.start_background()
n = len(synth.ALL_GESTURES)
print(f"mock robot on port {robot.port}, {n} gestures")

for name in ("open_hand", "yes", "kowtow"):
    idx = synth.ALL_GESTURES.index(name) + 1
    wire = control_link.encode(idx, n)
    print(f"send {name} as {wire.decode().strip()}")
    print("  reply:", control_link.send("127.0.0.1", robot.port, idx, n))

with socket.create_connection(("127.0.0.1", robot.port), timeout=2) as sock:
    sock.sendall(b"0,1,1\n")
    print("send 0,1,1 -> reply:", sock.makefile("rb").readline().decode().strip())

try:
    control_link.send("127.0.0.1", robot.port, n + 1, n)
except PreconditionError as exc:
    print("index past the table is refused before sending:", exc)

robot.shutdown()
robot.server_close()
