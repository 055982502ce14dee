# Conditional edge routing for the recipe graph.
#
# Rules for edge functions:
#   - Pure with respect to side effects: read state, return a route string only.
#   - Deterministic: same state always produces same route.
#   - Never raise exceptions.
#   - Returned strings must exactly match path_map keys in builder.py.
#
# The pipeline is linear; the only branch is the failure path. As soon as any
# node has appended to state["errors"], the graph skips to report.

from collections.abc import Callable

from perfweld.core.state import RecipeState

ROUTE_REPORT = "report"


def continue_or_report(next_node: str) -> Callable[[RecipeState], str]:
    """
    Build the router used after one node.

    Returns `next_node` while the run is clean, "report" once any error exists.
    """

    def route(state: RecipeState) -> str:
        if state.get("errors"):
            return ROUTE_REPORT
        return next_node

    route.__name__ = f"route_to_{next_node}"
    return route
