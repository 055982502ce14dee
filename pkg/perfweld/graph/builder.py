# Recipe pipeline topology.
#
#   load_recipe -> build_dataset -> train -> curve -> judge -> report
#
# Each hop is conditional: a node that recorded an error sends the run
# straight to report (see graph/edges.py). Node bodies live in perfweld/nodes/.

from langgraph.graph import END, START, StateGraph

from perfweld.core.state import RecipeState
from perfweld.graph.edges import continue_or_report
from perfweld.nodes.build_dataset import build_dataset_node
from perfweld.nodes.curve import curve_node
from perfweld.nodes.judge import judge_node
from perfweld.nodes.load_recipe import load_recipe_node
from perfweld.nodes.report import report_node
from perfweld.nodes.train import train_node

# Node name constants - define once, use everywhere.
NODE_LOAD_RECIPE   = "load_recipe"
NODE_BUILD_DATASET = "build_dataset"
NODE_TRAIN         = "train"
NODE_CURVE         = "curve"
NODE_JUDGE         = "judge"
NODE_REPORT        = "report"

PIPELINE = (NODE_LOAD_RECIPE, NODE_BUILD_DATASET, NODE_TRAIN, NODE_CURVE, NODE_JUDGE)


def build_graph():
    """
    Constructs and returns the compiled recipe graph.

    Graph topology:

            START
              |
        [ load_recipe ] ----\\
              |              |
        [ build_dataset ] ---|
              |              |
          [ train ] ---------|   (any node that records an error
              |              |    jumps straight to report)
          [ curve ] ---------|
              |              |
          [ judge ]          |
              |              |
          [ report ] <------/
              |
             END

    Returns:
        Compiled LangGraph runnable. Call .invoke(state).
    """
    graph = StateGraph(RecipeState)

    # ------------------------------------------------------------------
    # Register all nodes
    # ------------------------------------------------------------------
    graph.add_node(NODE_LOAD_RECIPE,   load_recipe_node)
    graph.add_node(NODE_BUILD_DATASET, build_dataset_node)
    graph.add_node(NODE_TRAIN,         train_node)
    graph.add_node(NODE_CURVE,         curve_node)
    graph.add_node(NODE_JUDGE,         judge_node)
    graph.add_node(NODE_REPORT,        report_node)

    graph.add_edge(START, NODE_LOAD_RECIPE)

    # ------------------------------------------------------------------
    # Linear pipeline with a failure exit after every step
    # ------------------------------------------------------------------
    for current, following in zip(PIPELINE, (*PIPELINE[1:], NODE_REPORT)):
        graph.add_conditional_edges(
            current,
            continue_or_report(following),
            {following: following, NODE_REPORT: NODE_REPORT},
        )

    graph.add_edge(NODE_REPORT, END)

    return graph.compile()
