from .codec import CodecParams, DEFAULT_BLOCK_LENGTH, decode_codeword, design_codec, encode
from .dataset import Dataset, MessageBits, derive_message, generate_dataset
from .scheme import (
    Answer,
    Query,
    chunk_length,
    client_decode,
    client_queries,
    coordinate,
    pack_answer,
    pack_query,
    server_answer,
    split_chunks,
    unpack_answer,
    unpack_query,
    verify_query_bijection,
)
from .session import (
    PrivacyAuditReport,
    RateExperimentReport,
    ServerAudit,
    SessionTranscript,
    baseline_download_all,
    privacy_audit,
    rate_experiment,
    run_session,
)

__all__ = [
    "Answer",
    "CodecParams",
    "DEFAULT_BLOCK_LENGTH",
    "Dataset",
    "MessageBits",
    "PrivacyAuditReport",
    "Query",
    "RateExperimentReport",
    "ServerAudit",
    "SessionTranscript",
    "baseline_download_all",
    "chunk_length",
    "client_decode",
    "client_queries",
    "coordinate",
    "decode_codeword",
    "derive_message",
    "design_codec",
    "encode",
    "generate_dataset",
    "pack_answer",
    "pack_query",
    "privacy_audit",
    "rate_experiment",
    "run_session",
    "server_answer",
    "split_chunks",
    "unpack_answer",
    "unpack_query",
    "verify_query_bijection",
]
