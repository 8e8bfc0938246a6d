"""Parsing, validation, filtering, and cross-trait harmonization of GWAS summary statistics.

Input files are tab-separated with a header. The standard column names are
SNP, CHR, BP, CM (optional), A1, A2, Z, N for summary statistics and
SNP, L2, L2_REG (optional, defaults to L2) for LD scores; a ColumnMap lets
callers remap arbitrary header names onto these roles.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import (
    DataError,
    DuplicateSnpId,
    EmptyIntersection,
    EmptyTable,
    MissingColumn,
)

VALID_ALLELES = frozenset("ACGT")
_AMBIGUOUS = (frozenset("AT"), frozenset("CG"))


@dataclass(frozen=True)
class SnpRecord:
    """One SNP association record: identity, alleles, Z score, sample size."""

    snp_id: str
    chrom: int
    position_bp: int
    allele_a1: str
    allele_a2: str
    z: float
    n: float
    position_cm: float | None = None

    def is_valid(self) -> bool:
        return (
            self.allele_a1 in VALID_ALLELES
            and self.allele_a2 in VALID_ALLELES
            and self.allele_a1 != self.allele_a2
            and np.isfinite(self.z)
            and np.isfinite(self.n)
            and self.n > 0
        )

    def is_strand_ambiguous(self) -> bool:
        return frozenset((self.allele_a1, self.allele_a2)) in _AMBIGUOUS


@dataclass
class ColumnMap:
    """Maps the roles this package needs onto the column names a file uses."""

    snp_id: str = "SNP"
    chrom: str = "CHR"
    position_bp: str = "BP"
    position_cm: str = "CM"
    allele_a1: str = "A1"
    allele_a2: str = "A2"
    z: str = "Z"
    n: str = "N"

    @classmethod
    def from_dict(cls, mapping: dict) -> "ColumnMap":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(mapping) - known
        if bad:
            raise DataError(f"unknown column-map keys: {sorted(bad)}")
        return cls(**mapping)


@dataclass
class SumstatsTable:
    """Ordered per-SNP association records for one trait, sorted by (chrom, bp)."""

    records: list[SnpRecord]
    trait_label: str = ""
    n_rejected: int = 0

    def __post_init__(self):
        ids = [r.snp_id for r in self.records]
        if len(set(ids)) != len(ids):
            seen, dup = set(), None
            for i in ids:
                if i in seen:
                    dup = i
                    break
                seen.add(i)
            raise DuplicateSnpId(f"duplicate snp_id {dup!r} in table {self.trait_label!r}")

    def __len__(self):
        return len(self.records)

    def snp_ids(self) -> list[str]:
        return [r.snp_id for r in self.records]

    def column(self, name: str) -> np.ndarray:
        vals = [getattr(r, name) for r in self.records]
        if name in ("snp_id", "allele_a1", "allele_a2"):
            return np.array(vals, dtype=object)
        if name == "position_cm":
            return np.array([np.nan if v is None else v for v in vals], dtype=float)
        return np.array(vals, dtype=float if name in ("z", "n") else int)

    def sorted(self) -> "SumstatsTable":
        recs = sorted(self.records, key=lambda r: (r.chrom, r.position_bp))
        return replace(self, records=recs)


@dataclass
class LdScoreTable:
    """Per-SNP LD scores: total (ell) and regression-SNP (ell_regression)."""

    entries: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __contains__(self, snp_id):
        return snp_id in self.entries

    def __len__(self):
        return len(self.entries)

    def ell(self, snp_id: str) -> float:
        return self.entries[snp_id][0]

    def ell_regression(self, snp_id: str) -> float:
        return self.entries[snp_id][1]

    def lookup(self, snp_ids) -> tuple[np.ndarray, np.ndarray]:
        ell = np.array([self.entries[s][0] for s in snp_ids])
        reg = np.array([self.entries[s][1] for s in snp_ids])
        return ell, reg

    @classmethod
    def from_arrays(cls, snp_ids, ell, ell_regression=None) -> "LdScoreTable":
        if ell_regression is None:
            ell_regression = ell
        ell = np.asarray(ell, dtype=float)
        ell_regression = np.asarray(ell_regression, dtype=float)
        if np.any(ell < 0) or np.any(ell_regression < 0) or not np.all(np.isfinite(ell)):
            raise DataError("LD scores must be finite and non-negative")
        return cls({s: (float(l), float(r)) for s, l, r in zip(snp_ids, ell, ell_regression)})

    @classmethod
    def constant(cls, snp_ids, value: float = 1.0) -> "LdScoreTable":
        return cls({s: (value, value) for s in snp_ids})


@dataclass
class AlignedPair:
    """Two allele-harmonized Z-score series on the SNP intersection of two traits.

    z2 has already been sign-flipped wherever trait 2 reported the swapped
    allele pair; flip_mask records where that happened. All arrays share
    the same length and SNP order.
    """

    snp_ids: list[str] | None
    z1: np.ndarray
    z2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    ell: np.ndarray
    ell_regression: np.ndarray
    flip_mask: np.ndarray
    chrom: np.ndarray | None = None
    position_bp: np.ndarray | None = None
    position_cm: np.ndarray | None = None
    label1: str = "trait1"
    label2: str = "trait2"
    dropped_incompatible: int = 0
    dropped_ambiguous: int = 0
    dropped_missing_ld: int = 0

    def __len__(self):
        return len(self.z1)

    def swapped(self) -> "AlignedPair":
        """The same pair with trait order reversed."""
        return replace(
            self,
            z1=self.z2,
            z2=self.z1,
            n1=self.n2,
            n2=self.n1,
            label1=self.label2,
            label2=self.label1,
        )


def parse_sumstats(path, columns: ColumnMap | None = None, trait_label: str | None = None) -> SumstatsTable:
    """Read a summary-statistics TSV into a validated, position-sorted table.

    Rows failing validation (non-finite Z, N <= 0, bad alleles) are dropped and
    counted in the returned table's n_rejected. Structural problems raise:
    MissingColumn, EmptyTable, DuplicateSnpId.
    """
    cmap = columns or ColumnMap()
    df = pd.read_csv(path, sep="\t", dtype=str)
    required = {
        "snp_id": cmap.snp_id,
        "chrom": cmap.chrom,
        "position_bp": cmap.position_bp,
        "allele_a1": cmap.allele_a1,
        "allele_a2": cmap.allele_a2,
        "z": cmap.z,
        "n": cmap.n,
    }
    missing = [name for name in required.values() if name not in df.columns]
    if missing:
        raise MissingColumn(f"{path}: missing column(s) {missing}")
    has_cm = cmap.position_cm in df.columns

    n_rows = len(df)
    if n_rows == 0:
        raise EmptyTable(f"{path}: no data rows")

    def _numeric(col):
        return pd.to_numeric(df[required[col]], errors="coerce").to_numpy(dtype=float)

    chrom = _numeric("chrom")
    bp = _numeric("position_bp")
    z = _numeric("z")
    n = _numeric("n")
    cm = pd.to_numeric(df[cmap.position_cm], errors="coerce").to_numpy(dtype=float) if has_cm else None
    a1 = df[cmap.allele_a1].str.upper().to_numpy(dtype=object)
    a2 = df[cmap.allele_a2].str.upper().to_numpy(dtype=object)
    ids = df[cmap.snp_id].to_numpy(dtype=object)

    allele_ok = np.array(
        [x in VALID_ALLELES and y in VALID_ALLELES and x != y for x, y in zip(a1, a2)]
    )
    ok = (
        np.isfinite(chrom)
        & np.isfinite(bp)
        & np.isfinite(z)
        & np.isfinite(n)
        & (n > 0)
        & allele_ok
        & np.asarray(pd.notna(ids), dtype=bool)
    )
    n_rejected = int(n_rows - ok.sum())
    if ok.sum() == 0:
        raise EmptyTable(f"{path}: all {n_rows} rows failed validation")

    records = [
        SnpRecord(
            snp_id=str(ids[i]),
            chrom=int(chrom[i]),
            position_bp=int(bp[i]),
            allele_a1=str(a1[i]),
            allele_a2=str(a2[i]),
            z=float(z[i]),
            n=float(n[i]),
            position_cm=(float(cm[i]) if cm is not None and np.isfinite(cm[i]) else None),
        )
        for i in np.flatnonzero(ok)
    ]
    label = trait_label if trait_label is not None else str(path)
    table = SumstatsTable(records, trait_label=label, n_rejected=n_rejected)
    return table.sorted()


def write_sumstats(table: SumstatsTable, path) -> None:
    """Write a table back out in the standard TSV layout."""
    cm = table.column("position_cm")
    data = {
        "SNP": table.snp_ids(),
        "CHR": table.column("chrom"),
        "BP": table.column("position_bp"),
        "A1": table.column("allele_a1"),
        "A2": table.column("allele_a2"),
        "Z": table.column("z"),
        "N": table.column("n"),
    }
    if np.any(np.isfinite(cm)):
        data["CM"] = cm
    pd.DataFrame(data).to_csv(path, sep="\t", index=False)


def parse_ld_scores(path, snp_col="SNP", l2_col="L2", l2_reg_col="L2_REG") -> LdScoreTable:
    """Read an LD score TSV; L2_REG falls back to L2 when absent."""
    df = pd.read_csv(path, sep="\t")
    if snp_col not in df.columns or l2_col not in df.columns:
        raise MissingColumn(f"{path}: need columns {snp_col!r} and {l2_col!r}")
    if len(df) == 0:
        raise EmptyTable(f"{path}: no data rows")
    ell = df[l2_col].to_numpy(dtype=float)
    reg = df[l2_reg_col].to_numpy(dtype=float) if l2_reg_col in df.columns else ell
    return LdScoreTable.from_arrays(df[snp_col].astype(str), ell, reg)


def write_ld_scores(ld: LdScoreTable, path, snp_ids=None) -> None:
    ids = list(snp_ids) if snp_ids is not None else list(ld.entries)
    ell, reg = ld.lookup(ids)
    pd.DataFrame({"SNP": ids, "L2": ell, "L2_REG": reg}).to_csv(path, sep="\t", index=False)


def filter_snps(table: SumstatsTable, keep_list=None, exclude_regions=()) -> SumstatsTable:
    """Restrict a table to a SNP id set and/or drop genomic regions.

    exclude_regions is a list of (chrom, bp_start, bp_end) with start < end,
    end-inclusive. Raises EmptyTable when nothing survives.
    """
    regions = list(exclude_regions)
    for chrom, start, end in regions:
        if not start < end:
            raise DataError(f"malformed region ({chrom}, {start}, {end}): start must be < end")
    keep = set(keep_list) if keep_list is not None else None

    def survives(rec: SnpRecord) -> bool:
        if keep is not None and rec.snp_id not in keep:
            return False
        for chrom, start, end in regions:
            if rec.chrom == chrom and start <= rec.position_bp <= end:
                return False
        return True

    records = [r for r in table.records if survives(r)]
    if not records:
        raise EmptyTable(f"no SNPs survive filtering in table {table.trait_label!r}")
    return replace(table, records=records)


def align_pair(t1: SumstatsTable, t2: SumstatsTable, ld: LdScoreTable) -> AlignedPair:
    """Intersect two tables by snp_id and harmonize trait 2's Z to trait 1's alleles.

    Where trait 2 reports the swapped allele pair, z2 is negated and the flip
    recorded. SNPs with incompatible alleles, strand-ambiguous SNPs (A/T, C/G),
    and SNPs absent from the LD score table are dropped and counted.
    """
    if len(t1) == 0 or len(t2) == 0:
        raise EmptyTable("cannot align an empty table")
    by_id = {r.snp_id: r for r in t2.records}

    kept: list[tuple[SnpRecord, float, bool]] = []
    n_ambiguous = n_incompatible = n_missing_ld = 0
    for r1 in t1.records:
        r2 = by_id.get(r1.snp_id)
        if r2 is None:
            continue
        if r1.is_strand_ambiguous() or r2.is_strand_ambiguous():
            n_ambiguous += 1
            continue
        if (r1.allele_a1, r1.allele_a2) == (r2.allele_a1, r2.allele_a2):
            z2, flip = r2.z, False
        elif (r1.allele_a1, r1.allele_a2) == (r2.allele_a2, r2.allele_a1):
            z2, flip = -r2.z, True
        else:
            n_incompatible += 1
            continue
        if r1.snp_id not in ld:
            n_missing_ld += 1
            continue
        kept.append((r1, z2, flip))

    if not kept:
        raise EmptyIntersection(
            f"no usable SNPs shared by {t1.trait_label!r} and {t2.trait_label!r}"
        )

    ids = [r.snp_id for r, _, _ in kept]
    ell, ell_reg = ld.lookup(ids)
    return AlignedPair(
        snp_ids=ids,
        z1=np.array([r.z for r, _, _ in kept]),
        z2=np.array([z for _, z, _ in kept]),
        n1=np.array([r.n for r, _, _ in kept]),
        n2=np.array([by_id[r.snp_id].n for r, _, _ in kept]),
        ell=ell,
        ell_regression=ell_reg,
        flip_mask=np.array([f for _, _, f in kept], dtype=bool),
        chrom=np.array([r.chrom for r, _, _ in kept], dtype=int),
        position_bp=np.array([r.position_bp for r, _, _ in kept], dtype=int),
        position_cm=np.array(
            [np.nan if r.position_cm is None else r.position_cm for r, _, _ in kept]
        ),
        label1=t1.trait_label,
        label2=t2.trait_label,
        dropped_incompatible=n_incompatible,
        dropped_ambiguous=n_ambiguous,
        dropped_missing_ld=n_missing_ld,
    )


def aligned_from_arrays(z1, z2, n1, n2, ell=None, ell_regression=None, label1="trait1", label2="trait2") -> AlignedPair:
    """Build an AlignedPair directly from already-harmonized arrays.

    Used by the simulator and benchmark paths, which generate both traits on a
    common SNP grid and need no allele bookkeeping.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    m = len(z1)
    if ell is None:
        ell = np.ones(m)
    ell = np.asarray(ell, dtype=float)
    ell_regression = ell if ell_regression is None else np.asarray(ell_regression, dtype=float)
    return AlignedPair(
        snp_ids=None,
        z1=z1,
        z2=z2,
        n1=np.broadcast_to(np.asarray(n1, dtype=float), (m,)).copy(),
        n2=np.broadcast_to(np.asarray(n2, dtype=float), (m,)).copy(),
        ell=ell,
        ell_regression=ell_regression,
        flip_mask=np.zeros(m, dtype=bool),
        label1=label1,
        label2=label2,
    )
