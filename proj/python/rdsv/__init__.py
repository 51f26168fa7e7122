"""Reference-dependent speaker diarization: Python bindings to the C++ core."""

from ._rdsv import (
    Annotation,
    DerReport,
    DiarizerConfig,
    EmbeddingSequence,
    ReferenceAudioLibrary,
    RdsvError,
    Segment,
    aggregate,
    build_ral,
    decode_dvec,
    decode_ral,
    der,
    diarize,
    encode_dvec,
    encode_ral,
    frame_oracle_der,
    gen_corpus,
    grid_search,
    label_timesteps,
    parse_rttm,
    read_dvec,
    read_ral,
    read_rttm,
    relabel_unreferenced,
    segment_dump,
    serialize_rttm,
    window_frames,
    window_plan,
    window_seconds,
    write_corpus,
    write_dvec,
    write_ral,
    write_rttm,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def error_code(exc: RdsvError) -> str:
    """Short error category (e.g. "bad_magic") carried by an RdsvError."""
    return exc.args[1] if len(exc.args) > 1 else ""
