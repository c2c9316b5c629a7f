import logging

from langgraph.graph import END, StateGraph

from .nodes import SweepState, assembler_node, planner_node, reviewer_node, simulator_node

logger = logging.getLogger(__name__)


def should_continue(state: SweepState):
    if state.get("feedback") == "APPROVED":
        return "assembler"

    if state.get("revision_count", 0) > state["sim_config"].max_revisions:
        logger.info("--- MAX REVISIONS REACHED ---")
        return "assembler"

    return "planner"


def build_graph():
    workflow = StateGraph(SweepState)

    workflow.add_node("planner", planner_node)
    workflow.add_node("simulator", simulator_node)
    workflow.add_node("reviewer", reviewer_node)
    workflow.add_node("assembler", assembler_node)

    workflow.set_entry_point("planner")

    workflow.add_edge("planner", "simulator")
    workflow.add_edge("simulator", "reviewer")

    workflow.add_conditional_edges(
        "reviewer",
        should_continue,
        {
            "assembler": "assembler",
            "planner": "planner",
        }
    )
    workflow.add_edge("assembler", END)

    return workflow.compile()
