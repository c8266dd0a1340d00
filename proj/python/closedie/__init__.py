"""Closed information extraction: KB lookups, linearized targets, constraint
tries, constrained beam search and scoring."""

import json as _json

from ._core import (  # noqa: F401
    ByteTokenizer,
    ConfigError,
    ConstraintTrie,
    ConstraintViolation,
    DecodeFailure,
    Error,
    IntegrityError,
    KbDecoder,
    KbStore,
    LoadError,
    ResolveError,
    ScorerError,
    artificial_prompt_instances,
    combine_losses,
    el_chain,
    entity_prompt_target,
    extract_ds_triples,
    linearize,
    map_date_to_year,
    order_triples,
    parse_linearized,
    score_predictions,
    split_indices,
    split_sizes,
)


def sentence_json(sentence):
    """Accepts a sentence dict or its JSON text."""
    if isinstance(sentence, str):
        return sentence
    return _json.dumps(sentence, ensure_ascii=False)
