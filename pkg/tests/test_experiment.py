import textwrap

import pytest

from semcom.errors import ConfigError
from semcom.experiment import (
    CSV_HEADER,
    bandwidth_saving,
    baseline_curve,
    generate_message,
    load_config,
    read_csv,
    run_experiment,
)

CLEAN_TOML = """\
n_symbols = 400
seed = 7
out = "sweep.csv"

[library]
preset = "digits"

[recognizer]
p_sub = 0.0

[channel]
kind = "noiseless"

[codec]
kind = "fixed"

[protocol]
strategy = "probe_down"

[baseline]
r_cliff = 2000.0
r_sat = 9000.0
acc_max = 0.909

[timing]
seconds_per_symbol = 0.5

[sweep]
seeds_per_point = 3
baseline_points = 50
baseline_max_bps = 12000.0
"""


def write_config(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


@pytest.fixture
def clean_cfg(tmp_path):
    cfg = load_config(write_config(tmp_path, CLEAN_TOML))
    cfg.out_path = str(tmp_path / "sweep.csv")
    return cfg


def test_load_toml_config(clean_cfg):
    assert clean_cfg.n_symbols == 400
    assert clean_cfg.seed == 7
    assert clean_cfg.codebook_kind == "fixed"
    assert clean_cfg.sweep.seeds_per_point == 3


def test_load_json_config(tmp_path):
    path = write_config(tmp_path, """\
    {"n_symbols": 10, "library": {"preset": "digits"},
     "sweep": {"seeds_per_point": 2, "baseline_points": 5}}
    """, name="cfg.json")
    cfg = load_config(path)
    assert cfg.n_symbols == 10
    assert cfg.sweep.baseline_points == 5


def test_unknown_section_rejected(tmp_path):
    path = write_config(tmp_path, CLEAN_TOML + "\n[mystery]\nx = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = write_config(tmp_path, CLEAN_TOML + "\n[extra]\n", name="a.toml")
    with pytest.raises(ConfigError):
        load_config(path)
    path = write_config(tmp_path, CLEAN_TOML.replace("p_sub = 0.0", "p_sub = 0.0\ntypo = 1"),
                        name="b.toml")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.toml")


def test_library_files_loaded_relative_to_config(tmp_path, person_lib):
    from semcom.library import to_file
    to_file(person_lib, tmp_path / "person.json")
    path = write_config(tmp_path, """\
    [library]
    sender = "person.json"
    """)
    cfg = load_config(path)
    assert cfg.sender_lib == person_lib
    assert cfg.receiver_lib == person_lib


def test_generate_message_seeded(clean_cfg):
    a = generate_message(clean_cfg)
    b = generate_message(clean_cfg)
    assert a == b
    assert len(a) == clean_cfg.n_symbols
    leaves = set(clean_cfg.sender_lib.leaves())
    assert all(s in leaves for s in a)


def test_run_experiment_zero_noise_exact(clean_cfg, tmp_path):
    out = tmp_path / "clean.csv"
    points = run_experiment(clean_cfg, out_path=out)
    semantic = [p for p in points if p.scheme == "semantic"]
    assert len(semantic) == 1
    assert semantic[0].accuracy == 1.0
    assert semantic[0].semantic_err == 0.0
    # 400 symbols x 4 bits / (400 x 0.5 s) = 8 bps
    assert semantic[0].bitrate_bps == pytest.approx(8.0)
    assert out.exists()


def test_csv_shape_and_round_trip(clean_cfg, tmp_path):
    out = tmp_path / "shape.csv"
    points = run_experiment(clean_cfg, out_path=out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(points)
    assert len(points) == 1 + clean_cfg.sweep.baseline_points
    parsed = read_csv(out)
    assert [p.scheme for p in parsed] == [p.scheme for p in points]
    assert all(abs(a.accuracy - b.accuracy) < 1e-6 for a, b in zip(parsed, points))


def test_csv_reproducible_byte_for_byte(clean_cfg, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(clean_cfg, out_path=a)
    run_experiment(clean_cfg, out_path=b)
    assert a.read_bytes() == b.read_bytes()


def test_flip_prob_sweep_accuracy_non_increasing(tmp_path):
    path = write_config(tmp_path, """\
    n_symbols = 120
    seed = 3

    [library]
    preset = "digits"

    [channel]
    kind = "bsc"

    [codec]
    kind = "robust"

    [sweep]
    seeds_per_point = 30
    flip_probs = [0.0, 0.01, 0.05]
    baseline_points = 10
    """)
    points = run_experiment(load_config(path), out_path=tmp_path / "flips.csv")
    semantic = [p for p in points if p.scheme == "semantic"]
    assert len(semantic) == 3
    assert semantic[0].accuracy == 1.0  # flip_prob 0 is lossless
    accs = [p.accuracy for p in semantic]
    assert accs == sorted(accs, reverse=True)


def test_flip_sweep_requires_bsc(tmp_path):
    path = write_config(tmp_path, """\
    [library]
    preset = "digits"

    [sweep]
    flip_probs = [0.0, 0.1]
    """)
    with pytest.raises(ConfigError):
        load_config(path)


def test_semantic_rate_independent_of_baseline_grid(clean_cfg, tmp_path):
    import dataclasses
    wide = dataclasses.replace(clean_cfg,
                               sweep=dataclasses.replace(clean_cfg.sweep,
                                                         baseline_max_bps=40_000.0,
                                                         baseline_points=17))
    a = run_experiment(clean_cfg, out_path=tmp_path / "narrow.csv")
    b = run_experiment(wide, out_path=tmp_path / "wide.csv")
    sem_a = next(p for p in a if p.scheme == "semantic")
    sem_b = next(p for p in b if p.scheme == "semantic")
    assert sem_a == sem_b  # the baseline axis never touches the semantic point


def test_baseline_curve_matches_config(clean_cfg):
    points = baseline_curve(clean_cfg)
    assert len(points) == clean_cfg.sweep.baseline_points
    assert points[0].bitrate_bps == 0.0
    assert points[0].accuracy == 0.0
    assert points[-1].accuracy == clean_cfg.baseline.acc_max


def test_bandwidth_saving(clean_cfg, tmp_path):
    points = run_experiment(clean_cfg, out_path=tmp_path / "s.csv")
    saving = bandwidth_saving(points)
    # semantic runs at 8 bps with accuracy 1.0 > acc_max: no baseline match
    assert saving == 1.0
    baseline_only = [p for p in points if p.scheme == "baseline"]
    assert bandwidth_saving(baseline_only) is None


def test_bandwidth_saving_matched_point():
    from semcom.experiment import CurvePoint

    def pt(scheme, rate, acc):
        return CurvePoint(scheme, rate, acc, 1 - acc, 0, 0, 0)

    points = [
        pt("semantic", 8.0, 0.90),
        pt("baseline", 4000.0, 0.50),
        pt("baseline", 8000.0, 0.88),
        pt("baseline", 8700.0, 0.91),  # cheapest row reaching 0.90
        pt("baseline", 12000.0, 0.91),
    ]
    assert bandwidth_saving(points) == pytest.approx(1.0 - 8.0 / 8700.0)
