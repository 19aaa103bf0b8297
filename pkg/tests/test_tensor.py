import numpy as np
import pytest

from tensorrm import oracles
from tensorrm.bits import BitWord, TriTensor, TriWord
from tensorrm.rm import RmCode
from tensorrm.tensor import (
    LinearComponent,
    adversarial_radius,
    decode_array,
    is_tensor_codeword,
    linear_component,
    rm_component,
    tensor_decode,
)
from tensorrm.trm import TrmCode, trm_encode


class _Fake:
    def __init__(self, d):
        self.d_min = d


def rm_codes(*pairs):
    return [rm_component(RmCode(r, m)) for r, m in pairs]


def random_tensor_codeword(codes, rng):
    """Random codeword of a tensor of arbitrary linear codes via Kronecker generators."""
    gens = [c.generator if isinstance(c, LinearComponent) else oracles.rm_generator(c.code.r, c.code.m) for c in codes]
    gen = oracles.generator_of(gens)
    msg = rng.integers(0, 2, gen.shape[0])
    return ((msg @ gen.astype(np.int64)) & 1).astype(np.uint8).reshape([c.length for c in codes])


def test_radius_formula():
    assert adversarial_radius([_Fake(4), _Fake(4)]) == 1
    assert adversarial_radius([_Fake(16), _Fake(16)]) == 7
    assert adversarial_radius([_Fake(5)]) == 0
    assert adversarial_radius(rm_codes((1, 3), (1, 3), (1, 3))) == 7
    assert adversarial_radius(rm_codes((1, 4), (1, 3))) == 1
    with pytest.raises(ValueError):
        adversarial_radius([])


def test_component_adapters():
    assert rm_component(RmCode(1, 3)).d_min == 4
    rep = linear_component([[1, 1, 1]])
    assert rep.d_min == 3 and rep.length == 3
    assert rm_component(RmCode(1, 2)).complete(TriWord.from_string("011*")) == TriWord.from_string("0110")
    assert rep.complete(TriWord.from_string("1**")) == TriWord.from_string("111")
    assert rep.complete(TriWord.from_string("***")).is_all_erased()
    assert rep.is_member(BitWord.from_string("111"))
    assert not rep.is_member(BitWord.from_string("110"))
    assert rm_component(RmCode(1, 2)).is_member(BitWord.from_string("0110"))
    with pytest.raises(ValueError):
        linear_component([1, 1, 1])


def test_clean_codeword_passes_through(rng):
    codes = rm_codes((1, 3), (1, 2), (0, 2))
    cw = random_tensor_codeword(codes, rng)
    out = tensor_decode(codes, cw)
    assert out.is_boolean() and np.array_equal(out.values, cw)


def test_repetition_square_one_flip():
    codes = rm_codes((0, 2), (0, 2))
    assert adversarial_radius(codes) == 1
    for i in range(16):
        w = np.ones(16, dtype=np.uint8)
        w[i] = 0
        out = tensor_decode(codes, w.reshape(4, 4))
        assert np.array_equal(out.values, np.ones((4, 4)))


def test_repetition_square_heavy_noise_discipline(rng):
    codes = rm_codes((0, 2), (0, 2))
    for _ in range(300):
        w = np.ones(16, dtype=np.uint8)
        w[rng.choice(16, 8, replace=False)] = 0
        out = tensor_decode(codes, w.reshape(4, 4))
        assert out.is_all_erased() or (out.is_boolean() and len(set(out.values.ravel())) == 1)


def test_rm13_cube_within_radius(rng):
    codes = rm_codes((1, 3), (1, 3), (1, 3))
    cws = np.stack([random_tensor_codeword(codes, rng) for _ in range(40)], axis=-1)
    for w in (3, 7):
        noisy = cws.copy().reshape(-1, 40)
        for b in range(40):
            noisy[rng.choice(512, w, replace=False), b] ^= 1
        out, failed = decode_array(codes, noisy.reshape(8, 8, 8, 40))
        assert not failed.any()
        assert np.array_equal(out, cws)


def test_erasures_only(rng):
    codes = rm_codes((1, 3), (1, 2))
    cw = random_tensor_codeword(codes, rng)
    erased = np.zeros(cw.shape, dtype=bool)
    erased.ravel()[rng.choice(cw.size, 7, replace=False)] = True
    out = tensor_decode(codes, TriTensor(cw, erased))
    assert np.array_equal(out.values, cw)


def test_output_is_codeword_or_erased_and_close(rng):
    codes = rm_codes((1, 2), (1, 2))
    threshold = 4
    for _ in range(500):
        w = rng.integers(0, 2, (4, 4), dtype=np.uint8)
        out = tensor_decode(codes, w)
        if out.is_boolean():
            assert is_tensor_codeword(codes, out.values)
            assert 2 * int((out.values != w).sum()) < threshold
        else:
            assert out.is_all_erased()


def test_pattern_cache_equivalence(rng):
    gen = np.array([[1, 0, 0, 1, 1], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]], dtype=np.uint8)
    for codes in (rm_codes((1, 3), (1, 3), (0, 2)), [linear_component(gen), rm_component(RmCode(1, 3))]):
        shape = [c.length for c in codes]
        for _ in range(40):
            cw = random_tensor_codeword(codes, rng)
            noisy = cw.copy().ravel()
            noisy[rng.choice(noisy.size, int(rng.integers(0, 10)), replace=False)] ^= 1
            erased = np.zeros(noisy.size, dtype=bool)
            erased[rng.choice(noisy.size, int(rng.integers(0, 4)), replace=False)] = True
            t = TriTensor(noisy.reshape(shape), erased.reshape(shape))
            assert tensor_decode(codes, t, use_pattern_cache=True) == tensor_decode(codes, t, use_pattern_cache=False)


def test_linear_component_dmin_and_templates(rng):
    gen = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=np.uint8)
    comp = linear_component(gen)
    assert comp.d_min == 2
    assert comp.template(np.array([1, 0, 0, 0], bool)) is comp.template(np.array([1, 0, 0, 0], bool))
    vals = np.array([[1, 1], [0, 0], [0, 1], [0, 1]], dtype=np.uint8)  # positions first
    out, ok = comp.complete_many(vals, np.array([True, False, False, False]))
    assert ok.tolist() == [True, True]
    assert out[:, 0].tolist() == [0, 0, 0, 0]
    assert out[:, 1].tolist() == [0, 0, 1, 1]


def test_decode_array_validation():
    codes = rm_codes((0, 1), (0, 1))
    with pytest.raises(ValueError):
        decode_array(codes, np.zeros((2, 2), np.uint8))
    with pytest.raises(ValueError):
        decode_array(codes, np.zeros((2, 4, 1), np.uint8))
    with pytest.raises(ValueError):
        is_tensor_codeword(codes, np.zeros((2, 3), np.uint8))


def test_single_code_base_case():
    codes = rm_codes((1, 2))
    assert tensor_decode(codes, TriTensor.from_bits(np.array([0, 1, 1, 0]))).values.tolist() == [0, 1, 1, 0]
    assert tensor_decode(codes, TriTensor.from_bits(np.array([1, 1, 1, 0]))).is_all_erased()


def test_dmin_multiplicative():
    for pairs in [((1, 2), (1, 2)), ((0, 2), (1, 3)), ((1, 3), (0, 1))]:
        code = TrmCode.from_pairs(pairs)
        assert oracles.min_distance_bruteforce(code) == code.d_min
    g1 = np.array([[1, 1, 1]], dtype=np.uint8)
    g2 = np.array([[1, 0, 1, 1], [0, 1, 1, 0]], dtype=np.uint8)
    assert oracles.min_distance_bruteforce([g1, g2]) == 3 * oracles.min_distance_bruteforce(g2)


def test_trm_codewords_are_tensor_codewords(rng):
    code = TrmCode.parse("1:2,2:3,0:1")
    cw = trm_encode(code, rng.integers(0, 2, code.dimension))
    assert is_tensor_codeword([rm_component(l) for l in code.layers], cw)
