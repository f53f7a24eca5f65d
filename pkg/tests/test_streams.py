from src.streams import derived_seed, replica_rng


def test_replica_streams_depend_only_on_seed_and_index():
    assert replica_rng(1, 4).random() == replica_rng(1, 4).random()
    assert replica_rng(1, 4).random() != replica_rng(1, 5).random()
    assert replica_rng(1, 4, 0).random() != replica_rng(1, 4, 1).random()


def test_derived_seed_is_a_stable_63_bit_integer():
    seed = derived_seed(20240601, 3, 1)
    assert seed == derived_seed(20240601, 3, 1)
    assert 0 <= seed < 2 ** 63
    assert seed != derived_seed(20240601, 3, 2)
