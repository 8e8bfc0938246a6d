import numpy as np
import pytest

from lcv.errors import (
    DataError,
    DuplicateSnpId,
    EmptyIntersection,
    EmptyTable,
    MissingColumn,
)
from lcv.sumstats import (
    ColumnMap,
    LdScoreTable,
    align_pair,
    filter_snps,
    parse_ld_scores,
    parse_sumstats,
    write_ld_scores,
    write_sumstats,
)

from conftest import record, small_table

HEADER = "SNP\tCHR\tBP\tA1\tA2\tZ\tN\n"


def write_tsv(path, rows, header=HEADER):
    path.write_text(header + "".join(rows))
    return path


class TestParse:
    def test_three_row_file_sorted(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            [
                "rs2\t1\t2000\tA\tG\t1.5\t100\n",
                "rs1\t1\t1000\tA\tG\t-0.5\t100\n",
                "rs3\t2\t500\tC\tT\t0.1\t200\n",
            ],
        )
        t = parse_sumstats(f, trait_label="demo")
        assert len(t) == 3 and t.n_rejected == 0
        assert t.snp_ids() == ["rs1", "rs2", "rs3"]
        assert t.records[0].z == -0.5

    def test_duplicate_snp_id_raises(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            ["rs1\t1\t1000\tA\tG\t1\t100\n", "rs1\t1\t2000\tA\tG\t2\t100\n"],
        )
        with pytest.raises(DuplicateSnpId):
            parse_sumstats(f)

    def test_zero_n_row_rejected_and_counted(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            ["rs1\t1\t1000\tA\tG\t1\t100\n", "rs2\t1\t2000\tA\tG\t2\t0\n"],
        )
        t = parse_sumstats(f)
        assert len(t) == 1 and t.n_rejected == 1

    def test_bad_allele_and_nonfinite_z_rejected(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            [
                "rs1\t1\t1000\tA\tA\t1\t100\n",
                "rs2\t1\t2000\tA\tX\t1\t100\n",
                "rs3\t1\t3000\tA\tG\tinf\t100\n",
                "rs4\t1\t4000\tA\tG\t1\t100\n",
            ],
        )
        t = parse_sumstats(f)
        assert t.snp_ids() == ["rs4"] and t.n_rejected == 3

    def test_missing_column(self, tmp_path):
        f = write_tsv(tmp_path / "a.tsv", ["rs1\t1\t1000\tA\tG\t1\n"], header="SNP\tCHR\tBP\tA1\tA2\tZ\n")
        with pytest.raises(MissingColumn):
            parse_sumstats(f)

    def test_empty_file(self, tmp_path):
        f = write_tsv(tmp_path / "a.tsv", [])
        with pytest.raises(EmptyTable):
            parse_sumstats(f)

    def test_column_map_remaps_headers(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            ["rs1\t1\t1000\tA\tG\t1.25\t100\n"],
            header="variant\tchrom\tpos\tea\toa\tzscore\tsamples\n",
        )
        cmap = ColumnMap.from_dict(
            {
                "snp_id": "variant",
                "chrom": "chrom",
                "position_bp": "pos",
                "allele_a1": "ea",
                "allele_a2": "oa",
                "z": "zscore",
                "n": "samples",
            }
        )
        t = parse_sumstats(f, cmap)
        assert t.records[0].z == 1.25

    def test_unknown_column_map_key(self):
        with pytest.raises(DataError):
            ColumnMap.from_dict({"bogus": "X"})

    def test_cm_column_optional(self, tmp_path):
        f = write_tsv(
            tmp_path / "a.tsv",
            ["rs1\t1\t1000\t0.5\tA\tG\t1\t100\n"],
            header="SNP\tCHR\tBP\tCM\tA1\tA2\tZ\tN\n",
        )
        t = parse_sumstats(f)
        assert t.records[0].position_cm == 0.5

    def test_roundtrip(self, tmp_path):
        t = small_table(4)
        write_sumstats(t, tmp_path / "out.tsv")
        back = parse_sumstats(tmp_path / "out.tsv")
        assert back.snp_ids() == t.snp_ids()
        np.testing.assert_allclose(back.column("z"), t.column("z"))


class TestLdScores:
    def test_l2_reg_defaults_to_l2(self, tmp_path):
        (tmp_path / "l.tsv").write_text("SNP\tL2\nrs1\t2.5\n")
        ld = parse_ld_scores(tmp_path / "l.tsv")
        assert ld.ell("rs1") == 2.5 and ld.ell_regression("rs1") == 2.5

    def test_roundtrip(self, tmp_path):
        ld = LdScoreTable.from_arrays(["rs1", "rs2"], [1.0, 3.0], [1.0, 2.0])
        write_ld_scores(ld, tmp_path / "l.tsv")
        back = parse_ld_scores(tmp_path / "l.tsv")
        assert back.ell("rs2") == 3.0 and back.ell_regression("rs2") == 2.0

    def test_negative_scores_rejected(self):
        with pytest.raises(DataError):
            LdScoreTable.from_arrays(["rs1"], [-1.0])


class TestFilter:
    def test_region_covering_nothing_is_identity(self):
        t = small_table(5)
        out = filter_snps(t, exclude_regions=[(9, 0, 10**9)])
        assert out.snp_ids() == t.snp_ids()

    def test_exclude_region_drops_inside_snps(self):
        recs = [record(snp_id=f"rs{i}", chrom=6, bp=bp) for i, bp in enumerate([1, 25e6, 30e6, 34e6, 40e6], 1)]
        recs[0] = record(snp_id="rs1", chrom=1, bp=1000)
        t = small_table(1)
        t.records = recs
        out = filter_snps(t, exclude_regions=[(6, 25_000_000, 34_000_000)])
        assert out.snp_ids() == ["rs1", "rs5"] or len(out) == 2

    def test_keep_list_disjoint_raises(self):
        with pytest.raises(EmptyTable):
            filter_snps(small_table(3), keep_list={"nope"})

    def test_malformed_region_raises(self):
        with pytest.raises(DataError):
            filter_snps(small_table(3), exclude_regions=[(1, 10, 10)])

    def test_idempotent(self):
        t = small_table(6)
        args = dict(keep_list={"rs1", "rs2", "rs4"}, exclude_regions=[(1, 3500, 4500)])
        once = filter_snps(t, **args)
        twice = filter_snps(once, **args)
        assert once.snp_ids() == twice.snp_ids() == ["rs1", "rs2"]


class TestAlign:
    def test_identity(self, unit_ld):
        t = small_table(5)
        pair = align_pair(t, t, unit_ld(t.snp_ids()))
        np.testing.assert_array_equal(pair.z1, pair.z2)
        assert not pair.flip_mask.any()

    def test_swapped_alleles_flip_z(self, unit_ld):
        t1 = small_table(1, z=[1.5])
        t2 = small_table(1, z=[1.5])
        t2.records = [record(z=1.5, a1="G", a2="A")]
        pair = align_pair(t1, t2, unit_ld(["rs1"]))
        assert pair.z2[0] == -1.5 and pair.flip_mask[0]

    def test_incompatible_alleles_dropped_and_counted(self, unit_ld):
        t1 = small_table(2)
        t2 = small_table(2)
        t2.records = [record(snp_id="rs1", a1="C", a2="T"), t2.records[1]]
        pair = align_pair(t1, t2, unit_ld(["rs1", "rs2"]))
        assert pair.snp_ids == ["rs2"] and pair.dropped_incompatible == 1

    def test_strand_ambiguous_dropped(self, unit_ld):
        t1 = small_table(3)
        t1.records = [
            record(snp_id="rs1", a1="A", a2="T"),
            record(snp_id="rs2", a1="C", a2="G", bp=2000),
            record(snp_id="rs3", a1="A", a2="G", bp=3000, z=0.7),
        ]
        pair = align_pair(t1, t1, unit_ld(["rs1", "rs2", "rs3"]))
        assert pair.snp_ids == ["rs3"] and pair.dropped_ambiguous == 2

    def test_all_ambiguous_raises_empty_intersection(self, unit_ld):
        t = small_table(1)
        t.records = [record(a1="A", a2="T")]
        with pytest.raises(EmptyIntersection):
            align_pair(t, t, unit_ld(["rs1"]))

    def test_disjoint_raises(self, unit_ld):
        t1 = small_table(2)
        t2 = small_table(2)
        t2.records = [record(snp_id="rx1"), record(snp_id="rx2", bp=2000)]
        with pytest.raises(EmptyIntersection):
            align_pair(t1, t2, unit_ld(["rs1", "rs2", "rx1", "rx2"]))

    def test_symmetric_in_trait_order(self, unit_ld):
        t1 = small_table(4, label="a")
        t2 = small_table(4, label="b")
        t2.records = [
            record(snp_id="rs1", a1="G", a2="A", z=0.3),
            record(snp_id="rs2", a1="A", a2="G", z=0.4, bp=2000),
            record(snp_id="rs3", a1="C", a2="T", z=0.5, bp=3000),
            record(snp_id="rs9", z=0.6, bp=9000),
        ]
        ld = unit_ld(["rs1", "rs2", "rs3", "rs9"])
        ab = align_pair(t1, t2, ld)
        ba = align_pair(t2, t1, ld)
        assert ab.snp_ids == ba.snp_ids
        assert int(ab.flip_mask.sum()) == int(ba.flip_mask.sum())

    def test_missing_ld_snps_dropped(self):
        t = small_table(3)
        ld = LdScoreTable.constant(["rs1", "rs3"])
        pair = align_pair(t, t, ld)
        assert pair.snp_ids == ["rs1", "rs3"] and pair.dropped_missing_ld == 1
