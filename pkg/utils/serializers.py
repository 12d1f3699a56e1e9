"""JSON in and out: group elements, coordinates, series and reports."""

import json
import logging
from typing import Any, Dict

from arithmetic.matgroup import BasisCoordinates, GroupElement
from arithmetic.padic import PadicParams
from arithmetic.roots import HEIGHT_ORDER, SL
from utils.exceptions import ParameterMismatch, PayloadError
from utils.validators import validate_coords_payload, validate_matrix_payload

logger = logging.getLogger(__name__)


def _default(obj: Any):
    if hasattr(obj, 'to_json'):
        return obj.to_json()
    if hasattr(obj, 'item'):
        return obj.item()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(payload: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation"""
    return json.dumps(payload, sort_keys=True, indent=2, default=_default)


def load_file(path: str) -> Dict[str, Any]:
    try:
        with open(path) as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Input file error: {str(e)}")
        raise PayloadError(f"cannot read {path}: {str(e)}")


def matrix_from_json(payload: Dict[str, Any], p: int, K: int, kind: str = SL) -> GroupElement:
    """Group element from matrix JSON; membership is checked"""
    if not validate_matrix_payload(payload):
        raise PayloadError("matrix JSON needs a square 'entries' list of decimal strings")
    if 'p' in payload and int(payload['p']) != p:
        raise ParameterMismatch(f"matrix is over p={payload['p']}, configured p={p}")
    K = int(payload.get('K', K))
    kind = payload.get('kind', kind)
    entries = [[int(x) for x in row] for row in payload['entries']]
    return GroupElement(entries, PadicParams(p, K), kind)


def coords_from_json(payload: Dict[str, Any], n: int, p: int, K: int, kind: str = SL) -> BasisCoordinates:
    if not validate_coords_payload(payload):
        raise PayloadError("coordinates JSON needs a 'coords' list of decimal strings")
    n = int(payload.get('n', n))
    K = int(payload.get('K', K))
    kind = payload.get('kind', kind)
    order = payload.get('order', HEIGHT_ORDER)
    try:
        return BasisCoordinates.from_ints([int(x) for x in payload['coords']], n, PadicParams(p, K), order, kind)
    except ValueError as e:
        raise PayloadError(str(e))
