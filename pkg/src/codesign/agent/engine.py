"""Prompt handling: cascade, task formulation, dispatch and response.

The agent never lets the language model touch the structured path: the
backend only picks concepts from fixed menus, extracts delimited name
lists that are validated against the model, and phrases results that are
post-checked against the structured output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..analysis import critical_path, find_spofs, propagate
from ..errors import (
    BackendUnavailableError,
    CodesignError,
    OffMenuExhaustedError,
    UnknownNodeRefError,
    UnresolvedReferenceError,
)
from ..knowledge import KnowledgeIndex, retrieve
from ..model import ModelDocument
from ..mutation import replicate_node, suggest_redundancy
from . import templates
from .backends import LabeledOption, LmBackend
from .network import DecisionNode, LeafSpec, default_network
from .session import ChatTurn, Session

MAX_CLASSIFY_ATTEMPTS = 3  # first try plus two stricter retries

_LAST_FAULT = re.compile(
    r"\b(?:last|previous|prior)\s+(?:reported\s+|mentioned\s+)?faults?\b", re.IGNORECASE
)
_COPIES = re.compile(
    r"\b(\d+|two|three|four|five)\s*(?:copies|replicas|instances|times)\b", re.IGNORECASE
)
_NUMBER_WORDS = {"two": 2, "three": 3, "four": 4, "five": 5}

PHRASE_INSTRUCTIONS = (
    "You are a safety engineering assistant. Rephrase the structured analysis "
    "result as a short, factual answer for the user. Mention every component "
    "name that appears in the result and do not invent components or numbers."
)


@dataclass(frozen=True)
class TaskSpec:
    tool: str
    args: dict
    formulated_prompt: str
    concept_path: tuple[str, ...] = ()


@dataclass(frozen=True)
class DecisionStep:
    node_id: str
    options: tuple[str, ...]
    choice: str | None
    attempts: int

    def to_json_dict(self) -> dict:
        return {
            "node": self.node_id,
            "options": list(self.options),
            "choice": self.choice,
            "attempts": self.attempts,
        }


@dataclass
class AgentReply:
    text: str
    result: dict
    trace: list[dict] = field(default_factory=list)
    tool: str | None = None
    revision: int = 0


class Agent:
    """Concept-guided request router over one model document."""

    def __init__(
        self,
        document: ModelDocument,
        backend: LmBackend,
        network: DecisionNode | None = None,
        index: KnowledgeIndex | None = None,
        retrieve_k: int = 3,
    ):
        self.document = document
        self.backend = backend
        self.network = network or default_network()
        self.index = index
        self.retrieve_k = retrieve_k

    # -- micro-decisions ----------------------------------------------------

    def classify(self, prompt: str, node: DecisionNode) -> tuple[str, DecisionStep]:
        """One micro-decision; the result is always one of the node's concepts."""
        options = [
            LabeledOption(opt.concept_id, opt.description) for opt in node.options
        ]
        few_shot = [
            (example, opt.concept_id) for opt in node.options for example in opt.triggers
        ]
        valid = {opt.label.lower(): opt.label for opt in options}
        context = prompt
        for attempt in range(1, MAX_CLASSIFY_ATTEMPTS + 1):
            raw = self.backend.choose(context, options, few_shot)
            label = valid.get(str(raw).strip().lower())
            if label is not None:
                step = DecisionStep(
                    node.node_id, tuple(o.label for o in options), label, attempt
                )
                return label, step
            ids = ", ".join(o.label for o in options)
            context = f"{prompt}\n\nAnswer with exactly one of: {ids}. Nothing else."
        raise OffMenuExhaustedError(
            f"backend never returned a valid concept at decision {node.node_id!r}"
        )

    def cascade(self, prompt: str) -> tuple[LeafSpec, tuple[str, ...], list[DecisionStep]]:
        """Walk the decision tree to a leaf; off-menu exhaustion falls back."""
        node = self.network
        path: list[str] = []
        steps: list[DecisionStep] = []
        while True:
            try:
                concept, step = self.classify(prompt, node)
            except OffMenuExhaustedError:
                steps.append(
                    DecisionStep(
                        node.node_id,
                        tuple(o.concept_id for o in node.options),
                        None,
                        MAX_CLASSIFY_ATTEMPTS,
                    )
                )
                return LeafSpec("Fallback"), tuple(path), steps
            path.append(concept)
            steps.append(step)
            child = node.option(concept).child
            if isinstance(child, LeafSpec):
                return child, tuple(path), steps
            node = child

    # -- task formulation ---------------------------------------------------

    def formulate_task(
        self,
        prompt: str,
        concept_path: tuple[str, ...],
        leaf: LeafSpec,
        session: Session,
    ) -> TaskSpec:
        model = self.document.model
        tool = leaf.tool

        if tool == "AnswerSafetyQuestion":
            return TaskSpec(tool, {"query": prompt}, f"Answer from documentation: {prompt}", concept_path)
        if tool == "FindSpofs":
            return TaskSpec(tool, {}, "Find all single points of failure.", concept_path)
        if tool == "SuggestRedundancy":
            return TaskSpec(tool, {}, "Suggest the best replication candidate.", concept_path)
        if tool == "Fallback":
            return TaskSpec(tool, {}, "Decline the out-of-scope request.", concept_path)

        if tool == "PropagateFaults":
            seeds = self._extract_names(prompt, model)
            if not seeds:
                raise UnresolvedReferenceError(
                    "no component names found in the prompt to seed faults with"
                )
            return TaskSpec(
                tool,
                {"seeds": seeds},
                f"Propagate faults seeded at: {', '.join(seeds)}.",
                concept_path,
            )

        if tool == "CriticalPath":
            wants_last_fault = bool(_LAST_FAULT.search(prompt))
            exclude: list[str] = []
            if wants_last_fault:
                if session.memory.last_fault is None:
                    raise UnresolvedReferenceError(
                        "the prompt references the last fault, but no fault was "
                        "reported in this session"
                    )
                exclude = sorted(session.memory.last_fault.faulty)
            detail = f" excluding {', '.join(exclude)}" if exclude else ""
            return TaskSpec(
                tool,
                {"exclude": exclude, "exclude_last_fault": wants_last_fault},
                f"Compute the critical path{detail}.",
                concept_path,
            )

        if tool == "ReplicateNode":
            names = self._extract_names(prompt, model)
            if not names:
                raise UnresolvedReferenceError(
                    "no component name found in the prompt to replicate"
                )
            target = names[0]
            copies_match = _COPIES.search(prompt)
            copies = 2
            if copies_match:
                token = copies_match.group(1).lower()
                copies = max(2, _NUMBER_WORDS.get(token) or int(token))
            return TaskSpec(
                tool,
                {"target": target, "copies": copies},
                f"Replicate {target} into {copies} instances.",
                concept_path,
            )

        raise CodesignError(f"no task template for tool {tool!r}")

    def _extract_names(self, prompt: str, model) -> list[str]:
        known = model.node_names()
        context = f"Known components: {', '.join(known)}\nPrompt: {prompt}"
        schema = "a comma-separated list of component names mentioned in the prompt"
        raw = self.backend.extract(context, schema)
        tokens = [t.strip() for t in re.split(r"[,;\n]+", raw) if t.strip()]
        if len(tokens) == 1 and tokens[0].lower() in ("none", "n/a", "-"):
            return []
        resolved: list[str] = []
        for token in tokens:
            name = _resolve_name(token, known)
            if name is None:
                raise UnknownNodeRefError(
                    f"extracted name {token!r} matches no model component"
                )
            if name not in resolved:
                resolved.append(name)
        return resolved

    # -- dispatch -----------------------------------------------------------

    def dispatch(self, task: TaskSpec, session: Session) -> dict:
        """Run exactly the tool named by the task and update session memory."""
        model = self.document.model
        tool = task.tool

        if tool == "PropagateFaults":
            state = propagate(model, task.args["seeds"])
            session.memory.last_fault = state
            result = state.to_json_dict()
        elif tool == "CriticalPath":
            result = critical_path(model, task.args.get("exclude", ())).to_json_dict()
        elif tool == "FindSpofs":
            result = find_spofs(model).to_json_dict()
        elif tool == "SuggestRedundancy":
            result = suggest_redundancy(model).to_json_dict()
        elif tool == "ReplicateNode":
            target = task.args["target"]
            new_model = replicate_node(model, target, task.args.get("copies", 2))
            new_model = self.document.commit(new_model)
            session.memory.forget_removed_nodes({target})
            result = {
                "kind": "ReplicateNode",
                "target": target,
                "replicas": [
                    n for n in new_model.node_names() if n not in set(model.node_names())
                ],
                "revision": new_model.revision,
            }
        elif tool == "AnswerSafetyQuestion":
            chunks = (
                retrieve(self.index, task.args["query"], self.retrieve_k)
                if self.index is not None and len(self.index)
                else []
            )
            result = {
                "query": task.args["query"],
                "chunks": [c.to_json_dict() for c in chunks],
            }
        elif tool == "Fallback":
            result = {"status": "unsupported", "message": templates.FALLBACK_TEXT}
        else:
            raise CodesignError(f"unknown tool {tool!r}")

        session.memory.last_result = result
        session.memory.model_revision = self.document.model.revision
        return result

    # -- response -----------------------------------------------------------

    def respond(self, result: dict, task: TaskSpec) -> str:
        """Phrase the result; fall back to the template if names go missing."""
        template = templates.render_result(result, task.tool)
        required = self._result_names(result, task)
        try:
            prose = self.backend.phrase(
                {"tool": task.tool, "result": result}, PHRASE_INSTRUCTIONS
            )
        except BackendUnavailableError:
            return template
        if not prose or not all(name in prose for name in required):
            return template
        return prose

    def _result_names(self, result: dict, task: TaskSpec) -> set[str]:
        candidates = set(self.document.model.node_names())
        for value in task.args.values():
            if isinstance(value, str):
                candidates.add(value)
            elif isinstance(value, (list, tuple)):
                candidates.update(v for v in value if isinstance(v, str))
        found: set[str] = set()
        _collect_names(result, candidates, found)
        return found

    # -- top level ----------------------------------------------------------

    def handle(self, prompt: str, session: Session) -> AgentReply:
        """Full turn: cascade, formulate, dispatch, respond. Never raises."""
        session.history.append(ChatTurn("user", prompt))
        steps: list[DecisionStep] = []
        tool: str | None = None
        try:
            leaf, path, steps = self.cascade(prompt)
            tool = leaf.tool
            task = self.formulate_task(prompt, path, leaf, session)
            result = self.dispatch(task, session)
            text = self.respond(result, task)
            trace = [s.to_json_dict() for s in steps]
            trace.append(
                {
                    "node": "task_formulation",
                    "options": [task.tool],
                    "choice": task.tool,
                    "attempts": 1,
                    "args": task.args,
                }
            )
        except (CodesignError, OSError) as exc:
            result = {
                "error": {
                    "type": type(exc).__name__,
                    "message": str(exc),
                    "tool": tool,
                }
            }
            text = templates.render_result(result, tool or "")
            trace = [s.to_json_dict() for s in steps]
        reply = AgentReply(
            text=text,
            result=result,
            trace=trace,
            tool=tool,
            revision=self.document.model.revision,
        )
        session.history.append(ChatTurn("assistant", text, result, trace))
        return reply


def _resolve_name(token: str, known: list[str]) -> str | None:
    lowered = token.lower()
    for name in known:
        if name.lower() == lowered:
            return name
    if len(token) >= 3:
        prefixed = [n for n in known if n.lower().startswith(lowered)]
        if len(prefixed) == 1:
            return prefixed[0]
    return None


def _collect_names(value, candidates: set[str], found: set[str]) -> None:
    if isinstance(value, str):
        if value in candidates:
            found.add(value)
    elif isinstance(value, dict):
        for key, sub in value.items():
            _collect_names(key, candidates, found)
            _collect_names(sub, candidates, found)
    elif isinstance(value, (list, tuple)):
        for sub in value:
            _collect_names(sub, candidates, found)
