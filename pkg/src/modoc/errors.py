"""Error taxonomy shared by every modoc subsystem.

Each error carries a stable ``code`` (its class name) that the service layer
exposes verbatim on the wire, so exception classes are part of the public
contract and must not be renamed casually.
"""

from __future__ import annotations

from typing import Any


class ModocError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__


# corpus-store

class FileUnreadable(ModocError):
    pass


class EmptyCorpus(ModocError):
    pass


class DuplicateId(ModocError):
    pass


class UnknownDocument(ModocError):
    pass


class IndexOutOfRange(ModocError):
    pass


# query-language

class EmptyQuery(ModocError):
    pass


class MalformedYearRange(ModocError):
    pass


class UnknownField(ModocError):
    pass


class NegatedYear(ModocError):
    pass


class ProviderFailure(ModocError):
    pass


# embedding-core

class DimensionMismatch(ModocError):
    pass


class EmptyList(ModocError):
    pass


# retrieval-engine

class EmptyQueryText(ModocError):
    pass


class NoUnits(ModocError):
    pass


class NoCandidates(ModocError):
    pass


class IndexCorpusMismatch(ModocError):
    pass


# workflow-graph

class UnknownModule(ModocError):
    pass


class KindMismatch(ModocError):
    pass


class FunctionAlreadyBound(ModocError):
    pass


class WouldCreateCycle(ModocError):
    pass


class SlotOccupied(ModocError):
    pass


class SlotUnknown(ModocError):
    pass


class SourceKindRejected(ModocError):
    pass


class NoFunctionBound(ModocError):
    pass


class MissingRequiredInput(ModocError):
    pass


class ServiceError(ModocError):
    pass


# generation-gateway

class UnsupportedKind(ModocError):
    pass


class ProviderUnreachable(ModocError):
    pass


class ProviderTimeout(ModocError):
    pass


class InvalidRequest(ModocError):
    pass


class DuplicateProviderId(ModocError):
    pass


# manuscript-store

class PositionOutOfRange(ModocError):
    pass


class UnknownRequestDigest(ModocError):
    pass


class NotGenerated(ModocError):
    pass


class UnconfirmedCheck(ModocError):
    pass


class UnknownManuscript(ModocError):
    pass


class StorageFailure(ModocError):
    pass


# service-api

class UnknownWorkflow(ModocError):
    pass


class PortInUse(ModocError):
    pass
