"""Request/response models for the suggestion service.

The wire format is JSON; field-by-field documentation lives in the README.
A request carries either a statement (featurized server-side with the
model's own feature configuration) or a ready-made feature list, never
both.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class StatementPayload(BaseModel):
    conclusion: str
    hypotheses: list[str] = []


class SuggestRequest(BaseModel):
    statement: StatementPayload | None = None
    features: list[str] | None = Field(default=None, min_length=1)
    model: Literal["forest", "knn"] = "forest"
    max_suggestions: int = Field(default=32, ge=1)

    @model_validator(mode="after")
    def _exactly_one_input(self):
        if (self.statement is None) == (self.features is None):
            raise ValueError("provide exactly one of 'statement' or 'features'")
        return self


class Suggestion(BaseModel):
    name: str
    score: float
    # What a proof-assistant client would try for this suggestion; plain
    # suggestion text until such a client fills it with a tactic.
    action_hint: str


class SuggestResponse(BaseModel):
    suggestions: list[Suggestion]
    model_version: int
    elapsed: float


class LearnRequest(BaseModel):
    statement: StatementPayload | None = None
    features: list[str] | None = Field(default=None, min_length=1)
    premises: list[str] = Field(min_length=1)

    @model_validator(mode="after")
    def _exactly_one_input(self):
        if (self.statement is None) == (self.features is None):
            raise ValueError("provide exactly one of 'statement' or 'features'")
        return self


class LearnResponse(BaseModel):
    model_version: int


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"
    model_version: int
    models: dict[str, dict]
