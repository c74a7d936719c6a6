"""Tree transducer equivalence workbench."""

from ._tteq import (
    AlphabetError,
    Document,
    Error,
    FormatError,
    InternalError,
    InvalidArgument,
    ParseError,
    ResourceError,
    balance,
    canonical,
    domain,
    equiv,
    from_bottom_up,
    gen_hard,
    hdt0l,
    load,
    normalize_term,
    parikh_image,
    parse,
    preimage,
    run_partial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
