from hypothesis import given, settings, strategies as st

from dsaplan.boxing import box_all, calibrate_epsilon, ensure_ratio_condition, leaves
from dsaplan.generate import general
from dsaplan.model import DUMMY_ID, Job, make_box
from dsaplan.sweep import profile
from dsaplan.unboxing import place_same_sizes, squeeze, unbox_all
from oracles import placement_valid

ALIGNS = [1, 2, 4, 8, 16, 64]


def test_single_box_single_buffer():
    b = make_box([Job(7, 3, 0, 4)], 8)
    assert unbox_all([b]) == {7: 0}


def test_disjoint_boxes_share_band():
    b1 = make_box([Job(1, 3, 0, 4)], 8)
    b2 = make_box([Job(2, 5, 4, 9)], 8)
    assert unbox_all([b1, b2]) == {1: 0, 2: 0}


def test_same_sizes_stack_per_row():
    jobs = [Job(i, 4, 0, 5) for i in range(3)]
    assert sorted(place_same_sizes(jobs, 0, 0).values()) == [0, 4, 8]
    assert place_same_sizes([Job(0, 4, 0, 2), Job(1, 4, 2, 5)], 0, 0) == {0: 0, 1: 0}


def test_watermark_uses_real_max_address():
    # A tall half-empty box must not push the next row up by its full height.
    tall = make_box([Job(1, 2, 0, 5)], 100)
    other = make_box([Job(2, 3, 1, 4)], 100)
    out = unbox_all([tall, other])
    assert sorted(out.values()) == [0, 2]


def test_mixed_sizes_partitioned_descending():
    jobs = [Job(0, 2, 0, 5), Job(1, 6, 1, 4), Job(2, 2, 2, 7)]
    out = unbox_all(jobs, 0, 0)
    assert out[1] == 0
    assert sorted((out[0], out[2])) == [6, 8]


def test_dummy_skipped_everywhere():
    d = Job(DUMMY_ID, 5000, 0, 9)
    b = make_box([d, Job(3, 2, 1, 4)], 6000)
    out = unbox_all([b, make_box([Job(4, 2, 2, 6)], 6000)])
    assert DUMMY_ID not in out and set(out) == {3, 4}


def hierarchy(seed, n=60):
    jobs = general(n, seed, horizon=30, max_life=10, sizes=(1, 3000), alignments=ALIGNS)
    prof = profile(jobs, 0)
    boxed, _ = ensure_ratio_condition(jobs, prof)
    eps, _ = calibrate_epsilon(boxed)
    return jobs, prof, box_all(boxed, eps, seed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_sparse_offsets_valid_and_squeeze_never_worse(seed):
    jobs, prof, res = hierarchy(seed)
    sparse = unbox_all(res.boxes, 0, seed)
    assert set(sparse) == {j.id for j in jobs}
    # alignment is ignored while unboxing, so validate without it
    plain = [Job(j.id, j.size, j.start, j.end) for j in jobs]
    assert placement_valid(plain, sparse)
    sparse_m = max(sparse[j.id] + j.size for j in jobs)
    pl = squeeze(plain, sparse, prof.interference, 0, None, seed)
    assert pl.makespan <= sparse_m
    aligned = squeeze(jobs, sparse, prof.interference, 24, None, seed)
    assert placement_valid(jobs, aligned.offsets, 24)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_box_contents_stay_in_box_band(seed):
    jobs, prof, res = hierarchy(seed, 40)
    out = unbox_all(res.boxes, 0, seed)
    sizes = {j.id: j.size for j in jobs}

    def band(box):
        ids = [j.id for j in leaves([box]) if j.id != DUMMY_ID]
        if not ids:
            return
        # the leaves of a box occupy at most the box's height
        lo = min(out[i] for i in ids)
        hi = max(out[i] + sizes[i] for i in ids)
        assert hi - lo <= box.size
        for c in box.contents:
            if c.contents:
                band(c)

    for b in res.boxes:
        band(b)


def test_squeeze_compact_is_noop():
    jobs = [Job(0, 3, 0, 4), Job(1, 2, 1, 5)]
    g = profile(jobs).interference
    pl = squeeze(jobs, {0: 0, 1: 3}, g)
    assert pl.offsets == {0: 0, 1: 3} and pl.makespan == 5


def test_squeeze_closes_gaps_and_caps():
    jobs = [Job(0, 3, 0, 4), Job(1, 2, 1, 5)]
    g = profile(jobs).interference
    assert squeeze(jobs, {0: 10, 1: 40}, g).makespan == 5
    assert squeeze(jobs, {0: 10, 1: 40}, g, cap=4) is None
