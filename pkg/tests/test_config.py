import pytest
from hypothesis import given, strategies as st

from tinybo.config import (
    KEYS,
    InnerConfig,
    ParamsConfig,
    apply_overrides,
    format_config,
    load_config,
    parse_config_text,
)
from tinybo.core import InvalidArgument
from tinybo.inner_opt import Chain, LocalSearch, ParallelRestarts, RandomSearch


def test_defaults():
    cfg = ParamsConfig()
    assert cfg.noise == 0.001 and cfg.init_samples == 10 and cfg.max_evaluations == 50
    assert not cfg.hp_opt_enabled
    assert cfg.acqui.kind == "gp_ucb"
    assert cfg.run_kernel().noise_variance == cfg.noise


def test_parse_text_with_comments_and_blank_lines():
    text = """
    # a comment
    bo.noise = 0.01   # trailing
    kernel.kind = matern

    acqui.kind = ei
    """
    assert parse_config_text(text) == {"bo.noise": "0.01", "kernel.kind": "matern", "acqui.kind": "ei"}


@pytest.mark.parametrize("text", ["bo.noise 0.1", "nope.key = 1"])
def test_parse_rejects_malformed(text):
    with pytest.raises(InvalidArgument):
        parse_config_text(text)


def test_apply_overrides_typed_and_string_values():
    cfg = apply_overrides(ParamsConfig(), {"bo.max_evaluations": "80", "bo.hp_opt_enabled": True,
                                           "kernel.lengthscale": "0.5,2", "kernel.kind": "matern"})
    assert cfg.max_evaluations == 80 and cfg.hp_opt_enabled
    assert cfg.kernel.kind == "matern52"
    assert cfg.kernel.lengthscale == pytest.approx((0.5, 2.0))


def test_overrides_are_validated_together():
    # raising init above the old max is fine when max is raised in the same layer
    cfg = apply_overrides(ParamsConfig(), {"bo.init_samples": 60, "bo.max_evaluations": 70})
    assert (cfg.init_samples, cfg.max_evaluations) == (60, 70)
    with pytest.raises(InvalidArgument):
        apply_overrides(ParamsConfig(), {"bo.init_samples": 60})


@pytest.mark.parametrize(
    "key,value",
    [("bo.noise", "-1"), ("bo.init_samples", "zero"), ("acqui.delta", "1.5"),
     ("kernel.lengthscale", "0"), ("bo.init_strategy", "sobol"), ("no.such", "1"),
     ("bo.hp_opt_enabled", "maybe")],
)
def test_bad_values_rejected(key, value):
    with pytest.raises(InvalidArgument):
        apply_overrides(ParamsConfig(), {key: value})


def test_layering_file_then_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("bo.max_evaluations = 90\nacqui.kappa = 2.0\n")
    cfg = load_config(p)
    assert cfg.max_evaluations == 90 and cfg.acqui.kappa == 2.0
    cfg2 = apply_overrides(cfg, {"acqui.kappa": "3"})
    assert cfg2.acqui.kappa == 3.0 and cfg2.max_evaluations == 90


def test_format_round_trips():
    cfg = apply_overrides(ParamsConfig(), {"kernel.lengthscale": "0.3,0.7", "mean.kind": "constant",
                                           "mean.constant": "1.5", "hp_opt.restarts": "3"})
    text = format_config(cfg)
    assert set(parse_config_text(text)) == set(KEYS)
    assert apply_overrides(ParamsConfig(), parse_config_text(text)) == cfg


@given(
    noise=st.floats(0, 1),
    init=st.integers(1, 20),
    extra=st.integers(0, 50),
    kappa=st.floats(0, 10),
    ls=st.floats(1e-3, 10),
)
def test_format_round_trip_property(noise, init, extra, kappa, ls):
    cfg = apply_overrides(ParamsConfig(), {"bo.noise": noise, "bo.init_samples": init,
                                           "bo.max_evaluations": init + extra, "acqui.kappa": kappa,
                                           "kernel.lengthscale": str(ls)})
    assert apply_overrides(ParamsConfig(), parse_config_text(format_config(cfg))) == cfg


def test_inner_config_builds_default_shape():
    spec = InnerConfig(candidates_per_dim=7, local_steps=3, restarts=2).build(3)
    assert isinstance(spec, ParallelRestarts) and spec.n_restarts == 2
    assert isinstance(spec.inner, Chain)
    rs, ls = spec.inner.stages
    assert isinstance(rs, RandomSearch) and rs.n_candidates == 21
    assert isinstance(ls, LocalSearch) and ls.max_steps == 3
