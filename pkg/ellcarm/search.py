"""
Range searches over worker processes with an ordered merge, and the table, csv and jsonl record encodings
"""

import concurrent.futures
import csv
import dataclasses
import io
import json
import typing

from ellcarm.arith import Factorization, factorize
from ellcarm.curve import CurveModel, DEFAULT_ENUM_CAP, ModNGroup
from ellcarm.korselt import (
    build_certificate,
    DEFAULT_ORACLE_CAP,
    is_carmichael_oracle,
    is_elliptic_pseudoprime,
    is_korselt_type1,
    is_korselt_type2,
    KorseltCertificate,
    Verdict,
)
from ellcarm.lseries import AnCache
from ellcarm.utils import DomainError, EnumEx, JSONType, ResourceLimitError, SearchWarning

DEFAULT_BLOCK_SIZE: typing.Final[int] = 2000

class SearchMode(EnumEx):
    TYPE1       = "type1"
    TYPE2       = "type2"
    ORACLE      = "oracle"
    PSEUDOPRIME = "pseudoprime"

class Parity(EnumEx):
    ODD = "odd"
    ALL = "all"

class OutputFormat(EnumEx):
    TABLE   = "table"
    CSV     = "csv"
    JSONL   = "jsonl"

# certificate attribute holding the verdict of each mode
_MODE_VERDICT: typing.Final[typing.Dict[SearchMode, str]] = {
    SearchMode.TYPE1 : "type1",
    SearchMode.TYPE2 : "type2",
    SearchMode.ORACLE : "carmichael",
    SearchMode.PSEUDOPRIME : "pseudoprime",
}

@dataclasses.dataclass(slots=True)
class SearchConfig:
    """
    Settings of a range search
    """

    curve: CurveModel
    min: int = 2
    max: int = 1000
    mode: SearchMode = SearchMode.TYPE1
    parity: Parity = Parity.ODD
    output: OutputFormat = OutputFormat.TABLE
    oracle_cap: int = DEFAULT_ORACLE_CAP
    enum_cap: int = DEFAULT_ENUM_CAP
    threads: int = 1
    block_size: int = DEFAULT_BLOCK_SIZE
    point_seed: int = 0

    def validate(self) -> None:
        if not 2 <= self.min <= self.max:
            raise DomainError(f"search range [{self.min}, {self.max}] needs 2 <= min <= max")
        if self.oracle_cap <= 0 or self.enum_cap <= 0:
            raise DomainError("resource caps must be positive")
        if self.threads < 1 or self.block_size < 1:
            raise DomainError("threads and block size must be positive")

@dataclasses.dataclass(slots=True)
class SearchRecord:
    """
    One emitted value: a hit with its certificate, or a value skipped at a resource cap
    """

    n: int
    certificate: KorseltCertificate | None = None
    skipped: str | None = None

    def as_dict(self) -> JSONType:
        if self.certificate is None:
            return {"n" : self.n, "skipped" : self.skipped}
        return self.certificate.as_dict()

    @classmethod
    def from_dict(cls, data: JSONType) -> "SearchRecord":
        if "skipped" in data:
            return cls(data["n"], None, data["skipped"])
        return cls(data["n"], KorseltCertificate.from_dict(data))

def evaluate(
    curve: CurveModel,
    n: int,
    mode: SearchMode,
    cache: AnCache | None = None,
    enum_cap: int = DEFAULT_ENUM_CAP,
    oracle_cap: int = DEFAULT_ORACLE_CAP,
    point_seed: int = 0,
) -> KorseltCertificate:
    """
    Certificate of n with the verdict of the given mode filled in
    """
    if cache is None:
        cache = AnCache(curve)
    if mode == SearchMode.TYPE1:
        return is_korselt_type1(curve, n, cache)
    if mode == SearchMode.TYPE2:
        return is_korselt_type2(curve, n, cache, cap=enum_cap)
    cert: KorseltCertificate = build_certificate(curve, n, cache)
    if mode == SearchMode.ORACLE:
        is_carmichael_oracle(curve, n, cache, oracle_cap, certificate=cert)
        return cert
    point: typing.Any = ()
    if cert.good_reduction and cert.factorization.num_primes >= 2:
        point = ModNGroup(curve, n).sample_point(point_seed)
    is_elliptic_pseudoprime(curve, n, point, cache, certificate=cert)
    return cert

def verdict_for(cert: KorseltCertificate, mode: SearchMode) -> Verdict | None:
    return getattr(cert, _MODE_VERDICT[mode])

def _search_range(curve: CurveModel, lo: int, hi: int, cache: AnCache, config: SearchConfig) -> typing.List[SearchRecord]:
    records: typing.List[SearchRecord] = []
    for n in range(lo, hi + 1):
        if config.parity == Parity.ODD and n % 2 == 0:
            continue
        try:
            cert: KorseltCertificate = evaluate(
                curve, n, config.mode, cache, config.enum_cap, config.oracle_cap, config.point_seed
            )
        except ResourceLimitError as e:
            records.append(SearchRecord(n, None, str(e)))
            continue
        if verdict_for(cert, config.mode) == Verdict.TRUE:
            records.append(SearchRecord(n, cert))
    return records

def search_block(
    config: SearchConfig, lo: int, hi: int, table: typing.Dict[int, int]
) -> typing.Tuple[typing.List[SearchRecord], typing.Dict[int, int]]:
    """
    Worker entry point: searches [lo, hi] and returns the records plus the a_p values it learned
    """
    cache: AnCache = AnCache(config.curve, table)
    records: typing.List[SearchRecord] = _search_range(config.curve, lo, hi, cache, config)
    return records, {p: ap for p, ap in cache.snapshot().items() if p not in table}

def _blocks(config: SearchConfig) -> typing.List[typing.Tuple[int, int]]:
    return [
        (lo, min(lo + config.block_size - 1, config.max))
        for lo in range(config.min, config.max + 1, config.block_size)
    ]

def _emit(records: typing.Iterable[SearchRecord]) -> typing.Iterator[SearchRecord]:
    for record in records:
        if record.skipped is not None:
            SearchWarning(record.n, record.skipped)
        yield record

def run_search(config: SearchConfig, cache: AnCache | None = None) -> typing.Iterator[SearchRecord]:
    """
    Yields hits and skipped records in increasing n, independent of the number of workers
    """
    config.validate()
    if cache is None:
        cache = AnCache(config.curve)
    if config.threads <= 1:
        for lo, hi in _blocks(config):
            yield from _emit(_search_range(config.curve, lo, hi, cache, config))
        return
    table: typing.Dict[int, int] = cache.snapshot()
    with concurrent.futures.ProcessPoolExecutor(max_workers=config.threads) as executor:
        futures: typing.List[concurrent.futures.Future] = [
            executor.submit(search_block, config, lo, hi, table) for lo, hi in _blocks(config)
        ]
        # block order, not completion order
        for future in futures:
            records, learned = future.result()
            cache.merge(learned)
            yield from _emit(records)

CSV_COLUMNS: typing.Final[typing.Tuple[str, ...]] = (
    "n", "factors", "an", "N", "type1", "type2", "carmichael", "pseudoprime", "primes", "notes", "skipped"
)

_JSON_COLUMNS: typing.Final[typing.Tuple[str, ...]] = ("factors", "an", "N", "primes")
_OPTIONAL_COLUMNS: typing.Final[typing.Tuple[str, ...]] = ("type1", "type2", "carmichael", "pseudoprime", "notes")

def _literal(value: typing.Any) -> str:
    return json.dumps(value, separators=(",", ":"), ensure_ascii=False)

def encode_jsonl(record: SearchRecord) -> str:
    if record.certificate is not None:
        return record.certificate.to_json()
    return _literal(record.as_dict())

def decode_jsonl(text: str) -> typing.List[SearchRecord]:
    return [SearchRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]

def write_csv_header(stream: typing.TextIO) -> None:
    csv.writer(stream, lineterminator="\n").writerow(CSV_COLUMNS)

def encode_csv_row(record: SearchRecord) -> str:
    data: JSONType = record.as_dict()
    row: typing.List[str] = [str(record.n)]
    for column in CSV_COLUMNS[1:]:
        if column == "skipped":
            row.append(data.get("skipped") or "")
        elif column in data and "skipped" not in data:
            row.append(_literal(data[column]))
        else:
            row.append("")
    buffer: io.StringIO = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(row)
    return buffer.getvalue().rstrip("\n")

def decode_csv(text: str) -> typing.List[SearchRecord]:
    records: typing.List[SearchRecord] = []
    for row in csv.DictReader(io.StringIO(text)):
        if row["skipped"]:
            records.append(SearchRecord(int(row["n"]), None, row["skipped"]))
            continue
        data: JSONType = {"n" : int(row["n"])}
        for column in _JSON_COLUMNS:
            data[column] = json.loads(row[column])
        for column in _OPTIONAL_COLUMNS:
            if row[column] != "":
                data[column] = json.loads(row[column])
        records.append(SearchRecord.from_dict(data))
    return records

def _with_factors(value: int | None) -> str:
    if value is None or value < 1:
        return _literal(value)
    return f"{value} = {factorize(value).format()}"

_PRIME_KEYS: typing.Final[typing.Tuple[str, ...]] = (
    "p", "e", "ap", "order", "divides", "val_ok", "anomalous", "enp", "canonical"
)

def encode_table(record: SearchRecord) -> str:
    """
    Human-readable block: one line for n, one indented line per prime, an optional notes line
    """
    if record.certificate is None:
        return f"n = {record.n} | skipped = {_literal(record.skipped)}"
    cert: KorseltCertificate = record.certificate
    data: JSONType = cert.as_dict()
    cells: typing.List[str] = [
        f"n = {cert.n} = {cert.factorization.format()}",
        f"an = {_literal(cert.an)}",
        f"N = {_with_factors(cert.N)}",
    ]
    for key in _OPTIONAL_COLUMNS[:-1]:
        if key in data:
            cells.append(f"{key} = {_literal(data[key])}")
    lines: typing.List[str] = [" | ".join(cells)]
    for rec in data["primes"]:
        lines.append("    " + " | ".join(f"{key} = {_literal(rec[key])}" for key in _PRIME_KEYS))
    if cert.notes:
        lines.append(f"    notes = {_literal(cert.notes)}")
    return "\n".join(lines)

def _split_cells(line: str) -> typing.Dict[str, typing.List[str]]:
    cells: typing.Dict[str, typing.List[str]] = {}
    for cell in line.strip().split(" | "):
        parts: typing.List[str] = cell.split(" = ")
        cells[parts[0]] = parts[1:]
    return cells

def decode_table(text: str) -> typing.List[SearchRecord]:
    records: typing.List[SearchRecord] = []
    data: JSONType | None = None
    def flush() -> None:
        if data is not None:
            records.append(SearchRecord.from_dict(data))
    for line in text.splitlines():
        if not line.strip():
            continue
        cells: typing.Dict[str, typing.List[str]] = _split_cells(line)
        if not line.startswith(" "):
            flush()
            n: int = int(cells["n"][0])
            if "skipped" in cells:
                data = {"n" : n, "skipped" : json.loads(" = ".join(cells["skipped"]))}
                continue
            data = {
                "n" : n,
                "factors" : Factorization.parse(cells["n"][1]).as_list(),
                "an" : json.loads(cells["an"][0]),
                "N" : json.loads(cells["N"][0]),
                "primes" : [],
            }
            for key in _OPTIONAL_COLUMNS[:-1]:
                if key in cells:
                    data[key] = json.loads(cells[key][0])
        elif data is not None and "notes" in cells:
            data["notes"] = json.loads(" = ".join(cells["notes"]))
        elif data is not None:
            data["primes"].append({key: json.loads(cells[key][0]) for key in _PRIME_KEYS})
    flush()
    return records

def write_records(records: typing.Iterable[SearchRecord], output: OutputFormat, stream: typing.TextIO) -> int:
    """
    Streams records in the given encoding; returns the number of hits written
    """
    hits: int = 0
    if output == OutputFormat.CSV:
        write_csv_header(stream)
    for record in records:
        if output == OutputFormat.JSONL:
            stream.write(encode_jsonl(record) + "\n")
        elif output == OutputFormat.CSV:
            stream.write(encode_csv_row(record) + "\n")
        else:
            stream.write(encode_table(record) + "\n")
        stream.flush()
        if record.certificate is not None:
            hits += 1
    return hits

def read_records(text: str, output: OutputFormat) -> typing.List[SearchRecord]:
    if output == OutputFormat.JSONL:
        return decode_jsonl(text)
    if output == OutputFormat.CSV:
        return decode_csv(text)
    return decode_table(text)
