import pytest

from nlikit.config import (DEFAULT_IVEC_SIGMA, DEFAULT_STRING_SIGMA,
                           ExperimentConfig, load_config,
                           parse_kernel_expression, parse_kernel_term,
                           render_kernel_expression, render_kernel_term)
from nlikit.errors import ConfigError
from nlikit.kernelops import KernelSpec


class TestKernelGrammar:
    def test_bare_string_kernel_range(self):
        spec = parse_kernel_term("presence:essay:5-9")
        assert spec == KernelSpec(kind="presence", modality="essay",
                                  p_min=5, p_max=9)

    def test_bare_string_kernel_single_p(self):
        spec = parse_kernel_term("intersection:transcript:7")
        assert (spec.kind, spec.p_min, spec.p_max) == ("intersection", 7, 7)
        assert spec.modality == "transcript"

    def test_rbf_default_sigma(self):
        spec = parse_kernel_term("rbf(presence:essay:5-9)")
        assert spec.sigma == DEFAULT_STRING_SIGMA
        assert not spec.squared

    def test_rbf_explicit_sigma(self):
        spec = parse_kernel_term("rbf(intersection:essay:2-4,0.7)")
        assert spec.sigma == 0.7

    def test_rbf2_sets_squared(self):
        spec = parse_kernel_term("rbf2(presence:transcript:5-7)")
        assert spec.squared
        assert spec.sigma == DEFAULT_STRING_SIGMA

    def test_ivec_default_sigma(self):
        spec = parse_kernel_term("ivec")
        assert spec == KernelSpec(kind="ivector_rbf", modality="audio",
                                  sigma=DEFAULT_IVEC_SIGMA)

    def test_ivec_explicit_sigma(self):
        assert parse_kernel_term("ivec:0.25").sigma == 0.25

    def test_ivec2(self):
        spec = parse_kernel_term("ivec2:2")
        assert spec.squared and spec.sigma == 2.0

    def test_whitespace_tolerated(self):
        spec = parse_kernel_term(" rbf( presence:essay:5-9 , 0.7 ) ")
        assert spec.sigma == 0.7

    def test_expression_sums_terms(self):
        specs = parse_kernel_expression(
            "presence:essay:5-9 + rbf2(presence:transcript:5-7) + ivec:0.5")
        assert len(specs) == 3
        assert specs[0].modality == "essay"
        assert specs[1].squared
        assert specs[2].kind == "ivector_rbf"

    def test_render_round_trip(self):
        exprs = [
            "presence:essay:5-9",
            "intersection:transcript:5-7",
            "rbf(presence:essay:5-9,1)",
            "rbf2(intersection:essay:2-4,0.7)",
            "ivec:0.5",
            "ivec2:2",
        ]
        for expr in exprs:
            specs = parse_kernel_expression(expr)
            assert parse_kernel_expression(
                render_kernel_expression(specs)) == specs

    def test_render_bare_term(self):
        spec = parse_kernel_term("presence:essay:5-9")
        assert render_kernel_term(spec) == "presence:essay:5-9"

    @pytest.mark.parametrize("bad", [
        "", "presence", "presence:essay", "presence:audio:1-2",
        "presence:essay:0-3", "presence:essay:5-3", "gaussian:essay:1-2",
        "rbf()", "rbf(ivec)", "rbf(presence:essay:1-2,0)",
        "rbf(presence:essay:1-2,-1)", "rbf(presence:essay:1-2,abc)",
        "ivec:0", "ivec:-0.5", "ivec:x", "ivec:1:2",
    ])
    def test_bad_terms_rejected(self, bad):
        with pytest.raises(ConfigError):
            parse_kernel_term(bad)

    @pytest.mark.parametrize("bad", ["", "  ", "ivec +", "+ ivec",
                                     "ivec + + ivec2"])
    def test_bad_expressions_rejected(self, bad):
        with pytest.raises(ConfigError):
            parse_kernel_expression(bad)


def essay_kernels():
    return parse_kernel_expression("presence:essay:2-3")


class TestExperimentConfig:
    def test_track_gating_essay_rejects_audio(self):
        with pytest.raises(ConfigError, match="essay track forbids audio"):
            ExperimentConfig(manifest="m", track="essay",
                             kernels=parse_kernel_expression("ivec"),
                             classifier="kda")

    def test_track_gating_essay_rejects_transcript(self):
        with pytest.raises(ConfigError, match="forbids transcript"):
            ExperimentConfig(
                manifest="m", track="essay",
                kernels=parse_kernel_expression("presence:transcript:2-3"),
                classifier="kda")

    def test_track_gating_speech_rejects_essay(self):
        with pytest.raises(ConfigError, match="forbids essay"):
            ExperimentConfig(manifest="m", track="speech",
                             kernels=essay_kernels(), classifier="kda")

    def test_speech_track_allows_transcript_and_audio(self):
        ExperimentConfig(
            manifest="m", track="speech",
            kernels=parse_kernel_expression(
                "presence:transcript:2-3 + ivec"),
            classifier="krr")

    def test_fusion_track_allows_all(self):
        ExperimentConfig(
            manifest="m", track="fusion",
            kernels=parse_kernel_expression(
                "presence:essay:2-3 + intersection:transcript:2-3 + ivec"),
            classifier="kda")

    def test_unknown_track_rejected(self):
        with pytest.raises(ConfigError, match="track"):
            ExperimentConfig(manifest="m", track="video",
                             kernels=essay_kernels(), classifier="kda")

    def test_unknown_classifier_rejected(self):
        with pytest.raises(ConfigError, match="classifier"):
            ExperimentConfig(manifest="m", track="essay",
                             kernels=essay_kernels(), classifier="svm")

    def test_unknown_split_rejected(self):
        with pytest.raises(ConfigError, match="split"):
            ExperimentConfig(manifest="m", track="essay",
                             kernels=essay_kernels(), classifier="kda",
                             eval_on="validation")

    def test_duplicate_train_split_rejected(self):
        with pytest.raises(ConfigError, match="twice"):
            ExperimentConfig(manifest="m", track="essay",
                             kernels=essay_kernels(), classifier="kda",
                             train_on=("train", "train"))

    def test_negative_lambda_rejected(self):
        with pytest.raises(ConfigError, match="lambda"):
            ExperimentConfig(manifest="m", track="essay",
                             kernels=essay_kernels(), classifier="krr",
                             lam=-0.5)


def write_config(path, **overrides):
    entries = {
        "corpus": "corpus/manifest.txt",
        "track": "fusion",
        "kernels": "presence:essay:2-3 + ivec:0.5",
        "classifier": "kda",
        "train_on": "train,dev",
        "eval_on": "test",
    }
    entries.update(overrides)
    lines = [f"{k} = {v}" for k, v in entries.items() if v is not None]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestLoadConfig:
    def test_happy_path_resolves_paths(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", cache_dir="grams",
                            seed="3", lowercase="true")
        config = load_config(path)
        assert config.manifest == (tmp_path / "corpus/manifest.txt").resolve()
        assert config.cache_dir == (tmp_path / "grams").resolve()
        assert config.track == "fusion"
        assert config.train_on == ("train", "dev")
        assert config.eval_on == "test"
        assert config.seed == 3
        assert config.lowercase is True
        assert len(config.kernels) == 2

    def test_defaults(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", train_on=None,
                            eval_on=None)
        config = load_config(path)
        assert config.train_on == ("train",)
        assert config.eval_on == "dev"
        assert config.lam == 1.0
        assert config.mu is None
        assert config.cache_dir is None
        assert config.seed == 0
        assert config.lowercase is False

    def test_hyperparameters_parsed(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", classifier="krr")
        path.write_text(path.read_text() + "lambda = 0.25\nmu = 0.001\n",
                        encoding="utf-8")
        config = load_config(path)
        assert config.lam == 0.25
        assert config.mu == 0.001

    def test_missing_required_key(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", kernels=None)
        with pytest.raises(ConfigError, match="missing required key"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path / "exp.conf")
        path.write_text(path.read_text() + "optimizer = adam\n",
                        encoding="utf-8")
        with pytest.raises(ConfigError, match="unknown config key"):
            load_config(path)

    def test_bad_boolean_rejected(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", lowercase="maybe")
        with pytest.raises(ConfigError, match="boolean"):
            load_config(path)

    def test_bad_number_rejected(self, tmp_path):
        path = write_config(tmp_path / "exp.conf")
        path.write_text(path.read_text() + "lambda = strong\n",
                        encoding="utf-8")
        with pytest.raises(ConfigError, match="bad number"):
            load_config(path)

    def test_bad_seed_rejected(self, tmp_path):
        path = write_config(tmp_path / "exp.conf", seed="13.5")
        with pytest.raises(ConfigError, match="integer"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "none.conf")

    def test_duplicate_key_rejected(self, tmp_path):
        path = write_config(tmp_path / "exp.conf")
        path.write_text(path.read_text() + "track = essay\n",
                        encoding="utf-8")
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)
