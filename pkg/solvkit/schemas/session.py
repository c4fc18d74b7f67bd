"""Session schema — validated group and search flags shared by all commands."""

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from solvkit.algebra.magnus import GroupContext
from solvkit.analysis.search import SearchBounds
from solvkit.core.config import settings


class SessionConfig(BaseModel):
    """Flags common to every command, checked before any computation."""

    rank: int = Field(default=settings.DEFAULT_RANK, ge=1)
    klass: int = Field(default=settings.DEFAULT_CLASS, ge=1)
    cap: int = Field(default=settings.VALUATION_CAP, ge=1)
    max_length: int = Field(default=settings.SEARCH_MAX_LENGTH, ge=0)
    exponent_cap: int = Field(default=settings.SEARCH_EXPONENT_CAP, ge=1)
    mode: Literal["text", "machine"] = "text"

    @model_validator(mode="after")
    def _class_guard(self) -> "SessionConfig":
        if self.klass > settings.MAX_CLASS:
            raise ValueError(f"class {self.klass} exceeds SOLVKIT_MAX_CLASS={settings.MAX_CLASS}")
        return self

    @property
    def context(self) -> GroupContext:
        return GroupContext(self.rank, self.klass)

    @property
    def bounds(self) -> SearchBounds:
        return SearchBounds.from_settings(max_length=self.max_length, exponent_cap=self.exponent_cap)

    @property
    def machine(self) -> bool:
        return self.mode == "machine"
