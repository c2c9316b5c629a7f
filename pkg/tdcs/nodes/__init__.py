from .planner import planner_node
from .simulator import simulator_node
from .assembler import assembler_node
from .reviewer import reviewer_node
from .state import SweepJob, SweepState
