"""Language-model backends behind a small three-call interface.

The engine only ever asks a backend to pick one option from a short menu,
to extract a delimited list of names, or to phrase a structured result.
The mock backend answers all three deterministically so the whole agent is
testable offline; the HTTP backend speaks the OpenAI-compatible chat
completions protocol.
"""

from __future__ import annotations

import abc
import json
import os
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import httpx

from ..errors import BackendUnavailableError
from . import templates

ENV_API_KEY = "CODESIGN_LLM_API_KEY"
ENV_BASE_URL = "CODESIGN_LLM_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com"

# (example text, option label) pairs used as few-shot context
Example = tuple[str, str]


@dataclass(frozen=True)
class LabeledOption:
    label: str
    text: str


class LmBackend(abc.ABC):
    """Minimal decision/extraction/phrasing interface."""

    @abc.abstractmethod
    def choose(
        self, context: str, options: Sequence[LabeledOption], few_shot: Sequence[Example]
    ) -> str:
        """Return the label of the best-matching option (may be off-menu)."""

    @abc.abstractmethod
    def extract(self, context: str, schema: str) -> str:
        """Return extracted text following the schema description."""

    @abc.abstractmethod
    def phrase(self, facts: Mapping, instructions: str) -> str:
        """Turn structured facts into a user-facing response."""


_WORD = re.compile(r"[a-z0-9_]+")

# aggressive list for extraction: none of these may be mistaken for a name
_STOPWORDS = frozenset(
    "a an and are be can could do does explain find for from get give given "
    "happen happens has have how i if in is it last me my of on or our please "
    "show should tell the then there this to us was we what when where which "
    "who why will with would you your".split()
)

# lighter list for classification: keep content words like happens/fault/safer
_CHOOSE_STOPWORDS = frozenset(
    "a an and are as at be but by can could did do does explain for from get "
    "give given had has have he her him his how i if in is it its me my no nor "
    "not of on or our out please she should show so some tell that the their "
    "them then there these they this to up us was we were what when where "
    "which who whose why will with would you your".split()
)


def _tokens(text: str) -> set[str]:
    return set(_WORD.findall(text.lower()))


def _choose_tokens(text: str) -> set[str]:
    return {t for t in _WORD.findall(text.lower()) if t not in _CHOOSE_STOPWORDS}


class MockBackend(LmBackend):
    """Deterministic rule-based backend for offline runs and tests.

    choose() scores the prompt against each option's few-shot examples by
    token overlap (Jaccard, ties broken lexicographically); extract() scans
    the prompt for known component names; phrase() renders the deterministic
    template.
    """

    def choose(self, context, options, few_shot):
        prompt_tokens = _choose_tokens(context)
        labels = [opt.label for opt in options]
        best_label = None
        best_score = 0.0
        for label in sorted(labels):
            score = 0.0
            for example, example_label in few_shot:
                if example_label != label:
                    continue
                example_tokens = _choose_tokens(example)
                union = prompt_tokens | example_tokens
                if not union:
                    continue
                score = max(score, len(prompt_tokens & example_tokens) / len(union))
            if score > best_score:
                best_score = score
                best_label = label
        if best_label is None:
            return "other" if "other" in labels else sorted(labels)[0]
        return best_label

    def extract(self, context, schema):
        known, prompt = _split_extract_context(context)
        found: list[str] = []
        lower_map = {name.lower(): name for name in known}
        for token in _WORD.findall(prompt.lower()):
            if token in _STOPWORDS:
                continue
            name = lower_map.get(token)
            if name is None and len(token) >= 3:
                prefixed = [n for n in known if n.lower().startswith(token)]
                if len(prefixed) == 1:
                    name = prefixed[0]
            if name is not None and name not in found:
                found.append(name)
        return ", ".join(found)

    def phrase(self, facts, instructions):
        return templates.render_result(facts.get("result", {}), facts.get("tool", ""))


def _split_extract_context(context: str) -> tuple[list[str], str]:
    """The engine formats extraction context as two labelled lines."""
    known: list[str] = []
    prompt_lines: list[str] = []
    for line in context.splitlines():
        if line.startswith("Known components:"):
            names = line.split(":", 1)[1]
            known = [n.strip() for n in names.split(",") if n.strip()]
        elif line.startswith("Prompt:"):
            prompt_lines.append(line.split(":", 1)[1])
        elif prompt_lines:
            prompt_lines.append(line)
    return known, "\n".join(prompt_lines)


class HttpBackend(LmBackend):
    """OpenAI-compatible chat-completions client.

    Base URL and API key come from CODESIGN_LLM_BASE_URL and
    CODESIGN_LLM_API_KEY unless given explicitly. Decision and extraction
    calls run at temperature 0; phrasing temperature is configurable.
    """

    def __init__(
        self,
        model: str = "gpt-3.5-turbo",
        base_url: str | None = None,
        api_key: str | None = None,
        timeout: float = 30.0,
        phrase_temperature: float = 0.7,
        transport: httpx.BaseTransport | None = None,
    ):
        self.model = model
        self.phrase_temperature = phrase_temperature
        base = base_url or os.environ.get(ENV_BASE_URL) or DEFAULT_BASE_URL
        key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        self._client = httpx.Client(
            base_url=base.rstrip("/"), headers=headers, timeout=timeout, transport=transport
        )

    def close(self) -> None:
        self._client.close()

    def _complete(self, messages: list[dict], temperature: float) -> str:
        payload = {"model": self.model, "messages": messages, "temperature": temperature}
        try:
            response = self._client.post("/v1/chat/completions", json=payload)
        except httpx.HTTPError as exc:
            raise BackendUnavailableError(f"backend request failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendUnavailableError(
                f"backend returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendUnavailableError(f"malformed backend response: {exc}") from exc

    def choose(self, context, options, few_shot):
        menu = "\n".join(f"- {opt.label}: {opt.text}" for opt in options)
        system = (
            "You classify a user request into exactly one concept. "
            "Answer with the concept id alone, nothing else.\n"
            f"Concepts:\n{menu}"
        )
        messages: list[dict] = [{"role": "system", "content": system}]
        for example, label in few_shot:
            messages.append({"role": "user", "content": example})
            messages.append({"role": "assistant", "content": label})
        messages.append({"role": "user", "content": context})
        return self._complete(messages, temperature=0).strip()

    def extract(self, context, schema):
        system = (
            "Extract information from the prompt. "
            f"Respond with {schema}. Respond with nothing else; "
            "if nothing matches, respond with an empty string."
        )
        messages = [
            {"role": "system", "content": system},
            {"role": "user", "content": context},
        ]
        return self._complete(messages, temperature=0).strip()

    def phrase(self, facts, instructions):
        messages = [
            {"role": "system", "content": instructions},
            {"role": "user", "content": json.dumps(facts, sort_keys=True)},
        ]
        return self._complete(messages, temperature=self.phrase_temperature).strip()
