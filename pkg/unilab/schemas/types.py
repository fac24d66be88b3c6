import math
from typing import Annotated

from pydantic import PlainSerializer


def _marker(value: float, marker: str):
    if math.isinf(value) or math.isnan(value):
        return marker if value > 0 or math.isnan(value) else f'-{marker}'
    return value


def _serializer(marker: str) -> PlainSerializer:
    return PlainSerializer(
        lambda v: _marker(v, marker),
        return_type=float | str,
        when_used='json',
    )


# JSON has no infinity; these fields carry a text marker instead.
Letters = Annotated[float, _serializer('unbounded')]
Deviation = Annotated[float, _serializer('undefined')]
Log2 = Annotated[float, _serializer('inf')]
