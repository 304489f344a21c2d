from .app import app, create_app
from .models import (
    BoundRequest,
    FamilyDocument,
    FamilySpec,
    Figure1Request,
    Prop5Request,
    ProtocolAuditRequest,
    ProtocolRunRequest,
    Report,
    SuffcondRequest,
)

__all__ = [
    "BoundRequest",
    "FamilyDocument",
    "FamilySpec",
    "Figure1Request",
    "Prop5Request",
    "ProtocolAuditRequest",
    "ProtocolRunRequest",
    "Report",
    "SuffcondRequest",
    "app",
    "create_app",
]
