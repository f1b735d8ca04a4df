"""Deterministic text rendering of structured tool results.

Used directly when no language model is reachable, and as the fallback
whenever a phrased response drops component names from the result.
"""

from __future__ import annotations

NO_PROPAGATION = "No faults propagate beyond the seeded set."

FALLBACK_TEXT = (
    "I can only help with safety analysis and codesign of the loaded system "
    "model. Try asking about fault propagation, the critical path, single "
    "points of failure, or redundancy suggestions."
)


def render_result(result: dict, tool: str) -> str:
    if "error" in result:
        err = result["error"]
        return f"The request could not be completed: {err.get('message', 'unknown error')}"
    renderer = _RENDERERS.get(tool)
    if renderer is None:
        return FALLBACK_TEXT
    return renderer(result)


def _render_propagate(result: dict) -> str:
    seeded = result.get("seeded", [])
    derived = result.get("derived", [])
    if not derived:
        if not seeded:
            return NO_PROPAGATION
        return f"{NO_PROPAGATION} Faulty components: {_join(seeded)}."
    return (
        f"Seeding faults in {_join(seeded)} additionally faults {_join(derived)}. "
        f"Faulty components: {_join(result.get('faulty', []))}."
    )


def _render_critical_path(result: dict) -> str:
    excluded = result.get("excluded_faults", [])
    suffix = f" Excluded components: {_join(excluded)}." if excluded else ""
    if result.get("blocked"):
        return f"No start-to-end path remains in the system graph.{suffix}"
    routes = "; ".join(" -> ".join(path) for path in result.get("paths", []))
    return (
        f"The critical path consists of: {_join(result.get('node_union', []))}. "
        f"Minimal paths: {routes}.{suffix}"
    )


def _render_spofs(result: dict) -> str:
    spofs = result.get("spofs", [])
    if not spofs:
        return "No single points of failure were found."
    witness = result.get("witness", {})
    details = "; ".join(
        f"{name} alone faults {witness[name]}" for name in spofs if name in witness
    )
    return f"Single points of failure: {_join(spofs)}. {details}."


def _render_suggest(result: dict) -> str:
    if not result.get("target"):
        return "No single points of failure were found; no replication is needed."
    return (
        f"Suggested mutation: replicate {result['target']} into "
        f"{_join(result.get('replicas', []))}. {result.get('rationale', '')}"
    ).strip()


def _render_replicate(result: dict) -> str:
    return (
        f"Replicated {result.get('target')} into {_join(result.get('replicas', []))} "
        f"(model revision {result.get('revision')}). Consumers now fail only if "
        f"every replica fails."
    )


def _render_knowledge(result: dict) -> str:
    chunks = result.get("chunks", [])
    if not chunks:
        return "No matching safety documentation was found."
    parts = [f"{c['title']}: {c['text']}" for c in chunks]
    return "Relevant safety guidance:\n\n" + "\n\n".join(parts)


def _render_fallback(result: dict) -> str:
    return result.get("message", FALLBACK_TEXT)


def _join(names) -> str:
    return ", ".join(names) if names else "none"


_RENDERERS = {
    "PropagateFaults": _render_propagate,
    "CriticalPath": _render_critical_path,
    "FindSpofs": _render_spofs,
    "SuggestRedundancy": _render_suggest,
    "ReplicateNode": _render_replicate,
    "AnswerSafetyQuestion": _render_knowledge,
    "Fallback": _render_fallback,
}
