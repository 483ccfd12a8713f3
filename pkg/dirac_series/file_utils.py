import json
import numbers
from fractions import Fraction


def rational_to_str(value) -> str:
    '''Canonical text form of an exact rational: "p" for integers, "p/q" otherwise.'''
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return '%d/%d' % (value.numerator, value.denominator)


def rational_from_str(text) -> Fraction:
    if isinstance(text, bool):
        raise ValueError("not a rational: %r" % (text,))
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError("rationals are stored as strings or integers, got %r" % (text,))
    return Fraction(text.strip())


def to_jsonable(obj):
    '''Recursively turn results into JSON-ready values; rationals and integers become strings.'''
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, numbers.Rational):
        return rational_to_str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if hasattr(obj, 'to_json'):
        return to_jsonable(obj.to_json())
    raise TypeError("cannot serialize %r" % (obj,))


def dumps(json_object) -> str:
    return json.dumps(json_object, indent=4, sort_keys=True, ensure_ascii=False)


def get_file_contents(filename, encoding='utf-8'):
    with open(filename, encoding=encoding) as f:
        content = f.read()
    return content


def read_json(filename, encoding='utf-8'):
    contents = get_file_contents(filename, encoding=encoding)
    return json.loads(contents)
