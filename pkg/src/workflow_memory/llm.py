"""Pluggable LLM clients for suggestion generation.

Production deployments point at an external completion service; tests
and the default CLI use a scripted client that maps prompt content to
canned replies, which keeps every pipeline run deterministic.
"""

from __future__ import annotations

from typing import Callable, Protocol, Sequence

import httpx


class LLMError(RuntimeError):
    """The LLM transport failed or returned something unusable."""


class LLMReplyParseError(LLMError):
    """No suggestion list could be parsed; carries the raw reply."""

    def __init__(self, message: str, reply: str):
        self.reply = reply
        super().__init__(message)


class LLMClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class ScriptedLLMClient:
    """Deterministic test double: first matching rule wins.

    A rule pairs a trigger with a canned reply; the trigger is either a
    substring looked up in the prompt or a predicate over it.
    """

    def __init__(
        self,
        rules: Sequence[tuple[str | Callable[[str], bool], str]] = (),
        default_reply: str = "1. Review the result and decide the next step",
    ):
        self.rules = list(rules)
        self.default_reply = default_reply
        self.calls: list[str] = []

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        for trigger, reply in self.rules:
            if callable(trigger):
                if trigger(prompt):
                    return reply
            elif trigger in prompt:
                return reply
        return self.default_reply


class HttpLLMClient:
    """Single-call JSON client: POST {"prompt": str} -> {"reply": str}."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, prompt: str) -> str:
        try:
            response = self._client.post(self.endpoint, json={"prompt": prompt})
            response.raise_for_status()
            return str(response.json()["reply"])
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise LLMError(f"LLM request to {self.endpoint} failed: {exc}") from exc
