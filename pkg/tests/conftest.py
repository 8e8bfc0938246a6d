import numpy as np
import pytest

from lcv.sumstats import LdScoreTable, SnpRecord, SumstatsTable


def record(snp_id="rs1", chrom=1, bp=1000, a1="A", a2="G", z=1.0, n=1000.0, cm=None):
    return SnpRecord(
        snp_id=snp_id,
        chrom=chrom,
        position_bp=bp,
        allele_a1=a1,
        allele_a2=a2,
        z=z,
        n=n,
        position_cm=cm,
    )


def small_table(n_snps=5, label="t", z=None, chrom=1):
    zs = z if z is not None else np.linspace(-1, 1, n_snps)
    recs = [
        record(snp_id=f"rs{i+1}", chrom=chrom, bp=(i + 1) * 1000, z=float(zs[i]), cm=(i + 1) * 0.1)
        for i in range(n_snps)
    ]
    return SumstatsTable(recs, trait_label=label)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_table():
    return small_table()


@pytest.fixture
def unit_ld():
    def _make(snp_ids):
        return LdScoreTable.constant(snp_ids)

    return _make
