"""scanrig: two-axis positioner control and spherical scan measurement stack.

Subsystems: kinematics (angle/step conversion, motion profiles), planner
(the serpentine scan state machine), backend (simulated motor execution),
sources (measurement plugins incl. simulated UWB ranging), store (checkpointed
ZIP session archives), runner/service (run orchestration + HTTP API), and
analysis (archive statistics).
"""

__version__ = "0.1.0"
