import enum
import mmh3
import typing
import warnings

def calc_hash(string: str) -> int:
    """
    Calculates a Murmur3 hash from a string
    """
    return mmh3.hash(string, signed = False)

class EnumEx(enum.Enum):
    """
    Enum but with a different string conversion
    """
    def __repr__(self) -> str:
        return f"{self.__class__.__name__}.{self._name_}"
    
    def __str__(self) -> str:
        return self._name_

JSONType: typing.TypeAlias = typing.Dict[str, typing.Any]
FactorList: typing.TypeAlias = typing.Tuple[typing.Tuple[int, int], ...]

class WarningBase(UserWarning):
    """
    Warning base class
    """
    def __init__(self, msg: str) -> None:
        super().__init__(msg)
        self._warn()
    
    def _warn(self) -> None:
        warnings.warn(self, stacklevel = 3)

class DomainError(ValueError):
    """
    Invalid integer argument
    """

    def __init__(self, msg: str) -> None:
        super().__init__(f"Domain error: {msg}")

class ArithOverflowError(OverflowError):
    """
    Integer outside the supported magnitude
    """

    def __init__(self, value: int, bound: int) -> None:
        super().__init__(f"Arithmetic overflow: |{value}| exceeds the supported bound {bound:#x}")
        self.value: int = value

class SingularCurveError(ValueError):
    """
    Weierstrass model with zero discriminant
    """

    def __init__(self, coefficients: typing.Sequence[int]) -> None:
        super().__init__(f"Singular curve: [{','.join(str(a) for a in coefficients)}] has discriminant 0")

class CurveFormatError(ValueError):
    """
    Malformed curve description
    """

    def __init__(self, text: str, msg: str) -> None:
        super().__init__(f"Curve format error in \"{text}\": {msg}")

class CorruptPointError(ValueError):
    """
    Point that is not a valid section of the curve
    """

    def __init__(self, modulus: int, coords: typing.Sequence[int], msg: str) -> None:
        super().__init__(f"Corrupt point ({' : '.join(str(c) for c in coords)}) mod {modulus}: {msg}")

class NotApplicableError(ValueError):
    """
    Bad reduction where good reduction is required
    """

    def __init__(self, p: int, msg: str = "") -> None:
        super().__init__(f"Not applicable: bad reduction at {p}" + (f" ({msg})" if msg else ""))
        self.p: int = p

class ResourceLimitError(RuntimeError):
    """
    Enumeration or census cap exceeded
    """

    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(f"Resource limit: {what} needs {size} elements but the cap is {cap}")
        self.size: int = size
        self.cap: int = cap

class CacheFileError(ValueError):
    """
    Unreadable or inconsistent a_p cache file
    """

    def __init__(self, path: str, msg: str) -> None:
        super().__init__(f"Cache file error in {path}: {msg}")

class ModelWarning(WarningBase):
    """
    The Weierstrass model may not be minimal
    """

    def __init__(self, label: str, primes: typing.Sequence[int]) -> None:
        super().__init__(
            f"Model warning: [{label}] may be non-minimal at {', '.join(str(p) for p in primes)}; "
            "reduction types at these primes follow the given model"
        )

class SearchWarning(WarningBase):
    """
    A search skipped a value
    """

    def __init__(self, n: int, msg: str) -> None:
        super().__init__(f"Search warning at n = {n}: {msg}")

class CacheWarning(WarningBase):
    """
    Ignored cache file entry
    """

    def __init__(self, path: str, line: int, msg: str) -> None:
        super().__init__(f"Cache warning at {path}:{line}: {msg}")
