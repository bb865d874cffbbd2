#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import (
    dataclass, field
)
from pathlib import Path
from typing import (
    Dict, List, Optional, Sequence, Tuple, Union
)

import logging
import math

import numpy as np
import pandas as pd

from .exceptions import (
    DomainError, IngestError, PricingError
)
from .options import (
    EuropeanCall, bs_delta, bs_implied_vol, bs_vega
)
from .score import Instruments
from .utils import (
    CALENDAR_DAYS_PER_YEAR, TRADING_DAYS_PER_YEAR, trading_days
)

logger = logging.getLogger(__name__)

# Header line written on top of every emitted table
SCHEMA_VERSION: int = 1
SCHEMA_HEADER: str = f"# schema-version: {SCHEMA_VERSION}"
# Maturity bucket targets (trading days)
BUCKET_TARGETS: Tuple[int, ...] = (21, 42, 63, 84, 105, 126)
# Partition edges of the descriptive and RMSE tables
DELTA_EDGES: Tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7)
DTM_EDGES: Tuple[float, ...] = (30, 60, 90, 120, 150)
VIX_EDGES: Tuple[float, ...] = (15, 20, 25, 30, 35)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class OptionQuote:
    """
    One option observation, stored in call-equivalent form after preprocessing.

    :param date: Trading date
    :param strike: Strike (index points)
    :param maturity_days: Calendar days to maturity
    :param price: Price (index points)
    :param is_call: ``True`` for calls (and converted puts after preprocessing)
    :param volume: Traded contracts
    :param bs_delta: Black-Scholes call delta
    :param implied_vol: Black-Scholes implied volatility (annualized)
    """

    date: pd.Timestamp
    strike: float
    maturity_days: int
    price: float
    is_call: bool = True
    volume: float = 0.0
    bs_delta: float = math.nan
    implied_vol: float = math.nan

    def __post_init__(self) -> None:
        if not self.price > 0:
            raise ValueError(f"Invalid option price (expected: > 0, got: {self.price})")
        if not self.strike > 0:
            raise ValueError(f"Invalid strike (expected: > 0, got: {self.strike})")


@dataclass(frozen=True)
class DailyPanel:
    """
    One day of data: return, spot, optional VIX and the selected option quotes.
    """

    date: pd.Timestamp
    ret: float
    spot: float
    vix: Optional[float] = None
    quotes: Tuple[OptionQuote, ...] = ()
    vega_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    maturities: Tuple[int, ...] = ()
    rate: float = 0.0

    def __post_init__(self) -> None:
        if len(self.quotes) != len(self.maturities) or len(self.quotes) != np.size(self.vega_weights):
            raise ValueError(
                f"Invalid panel (expected: matching quotes, maturities and vegas, got: "
                f"{len(self.quotes)}, {len(self.maturities)}, {np.size(self.vega_weights)})"
            )

    @property
    def calls(self) -> Tuple[EuropeanCall, ...]:
        return tuple(
            EuropeanCall(spot=self.spot, strike=quote.strike, maturity_days=maturity, rate=self.rate)
            for quote, maturity in zip(self.quotes, self.maturities)
        )

    def instruments(self, vix_maturity: Optional[int] = None, options: bool = True) -> Instruments:
        use_vix = vix_maturity is not None and self.vix is not None
        if options and self.quotes:
            return Instruments(vix_maturity if use_vix else None, self.calls, np.asarray(self.vega_weights))
        return Instruments(vix_maturity if use_vix else None)

    def observed(self, instruments: Instruments) -> np.ndarray:
        values = [self.vix] if instruments.has_vix else []
        if instruments.n_options:
            values.extend(100.0 * np.array([quote.price for quote in self.quotes]) / np.asarray(self.vega_weights))
        return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class DataSchema:
    """
    Column mapping of the delimited input files.
    """

    delimiter: str = ","
    date_format: Optional[str] = None
    date: str = "date"
    close: str = "close"
    ret: Optional[str] = None
    vix: str = "vix"
    strike: str = "strike"
    dtm: str = "dtm"
    price: str = "price"
    option_type: str = "cp_flag"
    call_flag: str = "C"
    volume: str = "volume"
    error_budget: int = 0


@dataclass(frozen=True)
class PreprocessConfig:
    rate: float = 0.0
    min_dtm: int = 14
    max_dtm: int = 183
    dtm_convention: float = TRADING_DAYS_PER_YEAR / CALENDAR_DAYS_PER_YEAR
    targets: Tuple[int, ...] = BUCKET_TARGETS


@dataclass
class MarketData:
    returns: pd.DataFrame
    vix: Optional[pd.Series] = None
    quotes: pd.DataFrame = field(default_factory=pd.DataFrame)
    gaps: List[str] = field(default_factory=list)
    errors: List[Tuple[str, int, str]] = field(default_factory=list)


def _read(path: Optional[PathLike], schema: DataSchema) -> pd.DataFrame:
    if path is None:
        return pd.DataFrame()
    try:
        return pd.read_csv(path, sep=schema.delimiter, dtype=str, keep_default_na=False, comment="#")
    except pd.errors.EmptyDataError:
        return pd.DataFrame()


def _parse(frame: pd.DataFrame, columns: Dict[str, str], numeric: Sequence[str], schema: DataSchema,
           source: str, errors: List[Tuple[str, int, str]]) -> pd.DataFrame:
    missing = [column for column in columns.values() if column not in frame.columns]
    if missing:
        raise IngestError(f"Invalid {source} header (expected: columns {list(columns.values())}, missing: {missing})")
    parsed = pd.DataFrame({name: frame[column].str.strip() for name, column in columns.items()})
    parsed["date"] = pd.to_datetime(parsed["date"], format=schema.date_format, errors="coerce")
    for name in numeric:
        parsed[name] = pd.to_numeric(parsed[name], errors="coerce")
    bad = parsed[["date", *numeric]].isna().any(axis=1)
    for index in np.flatnonzero(bad.to_numpy()):
        # header is line 1
        errors.append((source, int(index) + 2, "unparseable field"))
    return parsed[~bad].reset_index(drop=True)


def _reject_duplicates(frame: pd.DataFrame, source: str) -> None:
    duplicated = frame["date"][frame["date"].duplicated()]
    if len(duplicated):
        raise IngestError(
            f"Invalid {source} (expected: one row per date, got duplicates on "
            f"{', '.join(str(date.date()) for date in duplicated.unique()[:5])})"
        )


def ingest(paths: Dict[str, Optional[PathLike]], schema_config: DataSchema = DataSchema()) -> MarketData:
    """
    Read and date-align the return, VIX and option files.

    :param paths: Mapping with keys ``returns`` (required), ``vix`` and ``options``
    :type paths: Dict[str, Optional[PathLike]]
    :param schema_config: Column mapping, default to ``DataSchema()``
    :type schema_config: DataSchema

    :returns: MarketData -- Aligned series, gaps and the row error report
    """

    schema, errors = schema_config, []
    if paths.get("returns") is None:
        raise IngestError("Invalid paths (expected: a 'returns' file, got: none)")

    columns = {"date": schema.date, "close": schema.close}
    if schema.ret is not None:
        columns["ret"] = schema.ret
    numeric = ["close"] + (["ret"] if schema.ret is not None else [])
    returns = _parse(_read(paths["returns"], schema), columns, numeric, schema, "returns", errors)
    _reject_duplicates(returns, "returns")
    returns = returns.sort_values("date").set_index("date")
    if schema.ret is None:
        returns["ret"] = np.log(returns["close"]).diff()
        returns = returns.iloc[1:]
    returns = returns.rename(columns={"close": "spot"})[["ret", "spot"]]

    vix = None
    frame = _read(paths.get("vix"), schema)
    if not frame.empty:
        parsed = _parse(frame, {"date": schema.date, "vix": schema.vix}, ["vix"], schema, "vix", errors)
        _reject_duplicates(parsed, "vix")
        vix = parsed.set_index("date")["vix"].sort_index()

    quotes = pd.DataFrame(columns=["date", "strike", "dtm", "price", "is_call", "volume"])
    frame = _read(paths.get("options"), schema)
    if not frame.empty:
        columns = {"date": schema.date, "strike": schema.strike, "dtm": schema.dtm, "price": schema.price,
                   "option_type": schema.option_type, "volume": schema.volume}
        parsed = _parse(frame, columns, ["strike", "dtm", "price", "volume"], schema, "options", errors)
        parsed["is_call"] = parsed.pop("option_type").str.upper() == schema.call_flag.upper()
        quotes = parsed[["date", "strike", "dtm", "price", "is_call", "volume"]]

    if len(errors) > schema.error_budget:
        raise IngestError(
            f"Invalid input rows (expected: at most {schema.error_budget}, got: {len(errors)})", errors
        )
    for source, line, reason in errors:
        logger.warning("Skipped %s line %d: %s", source, line, reason)

    gaps = []
    if vix is not None:
        gaps += [f"vix missing on {date.date()}" for date in returns.index.difference(vix.index)]
    if len(quotes):
        gaps += [f"options dated {date.date()} without a return"
                 for date in pd.DatetimeIndex(quotes["date"].unique()).difference(returns.index)]
    return MarketData(returns=returns, vix=vix, quotes=quotes, gaps=gaps, errors=errors)


def put_to_call(put: float, spot: float, strike: float, rate: float, maturity: int) -> float:
    return put + spot - strike * math.exp(-rate * maturity)


def call_to_put(call: float, spot: float, strike: float, rate: float, maturity: int) -> float:
    return call - spot + strike * math.exp(-rate * maturity)


def _select_buckets(candidates: pd.DataFrame, targets: Sequence[int]) -> pd.DataFrame:
    chosen, lower = [], 0
    for target in targets:
        window = candidates[(candidates["maturity"] > lower) & (candidates["maturity"] <= target)]
        lower = target
        if window.empty:
            continue
        window = window[window["maturity"] == window["maturity"].max()]
        ranked = window.assign(distance=(window["bs_delta"] - 0.5).abs()).sort_values(
            ["volume", "distance", "strike"], ascending=[False, True, True], kind="mergesort"
        )
        chosen.append(ranked.iloc[0])
    return pd.DataFrame(chosen)


def preprocess(data: MarketData, config: PreprocessConfig = PreprocessConfig()) -> List[DailyPanel]:
    """
    Turn aligned market data into daily panels: OTM filter, put-call parity conversion,
    no-arbitrage screening, most-liquid selection per maturity bucket and vega weights.

    :param data: Ingested market data
    :type data: MarketData
    :param config: Filters and conventions, default to ``PreprocessConfig()``
    :type config: PreprocessConfig

    :returns: List[DailyPanel] -- One panel per return date
    """

    quotes = data.quotes.copy()
    selected: Dict[pd.Timestamp, pd.DataFrame] = {}
    if len(quotes):
        quotes = quotes[quotes["date"].isin(data.returns.index)]
        quotes = quotes.assign(spot=data.returns.loc[quotes["date"], "spot"].to_numpy())
        otm = np.where(quotes["is_call"], quotes["strike"] >= quotes["spot"], quotes["strike"] <= quotes["spot"])
        keep = (otm & (quotes["volume"] > 0) & (quotes["price"] > 0)
                & quotes["dtm"].between(config.min_dtm, config.max_dtm))
        quotes = quotes[keep].copy()
        quotes["maturity"] = trading_days(quotes["dtm"].to_numpy(), config.dtm_convention) if len(quotes) else []

        rows = []
        for row in quotes.itertuples(index=False):
            price = row.price if row.is_call else put_to_call(row.price, row.spot, row.strike, config.rate,
                                                               row.maturity)
            call = EuropeanCall(spot=row.spot, strike=row.strike, maturity_days=int(row.maturity), rate=config.rate)
            try:
                iv = bs_implied_vol(price, call)
            except (DomainError, PricingError) as error:
                logger.info("Dropped quote %s K=%g DTM=%d: %s", row.date.date(), row.strike, row.dtm, error)
                continue
            rows.append({
                "date": row.date, "strike": row.strike, "dtm": int(row.dtm), "maturity": int(row.maturity),
                "price": price, "volume": row.volume, "iv": iv, "bs_delta": bs_delta(call, iv),
                "vega": bs_vega(call, iv), "was_call": row.is_call
            })
        if rows:
            frame = pd.DataFrame(rows)
            for date, group in frame.groupby("date", sort=True):
                selected[date] = _select_buckets(group, config.targets)

    panels = []
    for date, row in data.returns.iterrows():
        vix = None
        if data.vix is not None and date in data.vix.index:
            vix = float(data.vix.loc[date])
        group = selected.get(date)
        if group is None or group.empty:
            panels.append(DailyPanel(date=date, ret=float(row["ret"]), spot=float(row["spot"]), vix=vix,
                                     rate=config.rate))
            continue
        quotes_today = tuple(
            OptionQuote(date=date, strike=float(q.strike), maturity_days=int(q.dtm), price=float(q.price),
                        is_call=True, volume=float(q.volume), bs_delta=float(q.bs_delta), implied_vol=float(q.iv))
            for q in group.itertuples(index=False)
        )
        panels.append(DailyPanel(
            date=date, ret=float(row["ret"]), spot=float(row["spot"]), vix=vix, quotes=quotes_today,
            vega_weights=group["vega"].to_numpy(dtype=float), maturities=tuple(int(m) for m in group["maturity"]),
            rate=config.rate
        ))
    return panels


def _bucket_labels(edges: Sequence[float]) -> List[str]:
    labels = [f"<{edges[0]:g}"]
    labels += [f"{low:g}-{high:g}" for low, high in zip(edges[:-1], edges[1:])]
    return labels + [f">={edges[-1]:g}"]


def bucketize(values: Sequence[float], edges: Sequence[float]) -> pd.Categorical:
    """
    Assign values to the half-open buckets ``(-inf, e0), [e0, e1), ..., [e_last, inf)``.
    """

    labels = _bucket_labels(edges)
    codes = np.searchsorted(np.asarray(edges, dtype=float), np.asarray(values, dtype=float), side="right")
    return pd.Categorical.from_codes(codes, categories=labels)


def describe_panels(panels: Sequence[DailyPanel]) -> pd.DataFrame:
    """
    Counts, mean price and mean implied volatility of the selected quotes by delta,
    calendar DTM and VIX-level bucket.
    """

    records = [{"delta": quote.bs_delta, "dtm": quote.maturity_days, "vix": panel.vix,
                "price": quote.price, "iv": quote.implied_vol}
               for panel in panels for quote in panel.quotes]
    frame = pd.DataFrame(records, columns=["delta", "dtm", "vix", "price", "iv"])
    tables = []
    for partition, edges in (("delta", DELTA_EDGES), ("dtm", DTM_EDGES), ("vix", VIX_EDGES)):
        usable = frame.dropna(subset=[partition])
        grouped = usable.groupby(bucketize(usable[partition], edges), observed=False)
        table = grouped.agg(count=("price", "size"), mean_price=("price", "mean"), mean_iv=("iv", "mean"))
        tables.append(table.reset_index(names="bucket").assign(partition=partition))
    return pd.concat(tables, ignore_index=True)[["partition", "bucket", "count", "mean_price", "mean_iv"]]


def write_table(frame: pd.DataFrame, path: PathLike, float_format: str = "%.17g") -> Path:
    """
    Write a table as comma-separated text preceded by the schema-version header.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(SCHEMA_HEADER + "\n")
        frame.to_csv(handle, index=False, float_format=float_format, lineterminator="\n")
    return path


def read_table(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")
