"""
Unit tests for configuration records and JSON payloads.
"""
import json

import numpy as np
import pytest
import yaml

from zesim.models import (
    CertificatePayload, ChannelPayload, ClassicalGraphPayload, GraphPayload, MatrixPayload,
    ConfigError, PayloadError, SolverOptions, ZesimConfig, ZesimError, load_config, load_payload,
    parse_payload,
)


class TestSolverOptions:
    """Tests for SolverOptions."""

    def test_defaults(self):
        """Default tolerances and iteration cap."""
        opts = SolverOptions()
        assert opts.gap_tol == 1e-8
        assert opts.feas_tol == 1e-8
        assert opts.max_iter == 200
        assert opts.validate() == []

    def test_invalid(self):
        """Non-positive tolerances and a zero iteration cap are reported."""
        errors = SolverOptions(gap_tol=0.0, max_iter=0).validate()
        assert any("gap_tol" in e for e in errors)
        assert any("max_iter" in e for e in errors)

    def test_relaxed_tolerance_not_tighter(self):
        """The relaxed tolerance may not be tighter than the target tolerances."""
        errors = SolverOptions(gap_tol=1e-4, feas_tol=1e-4, relaxed_tol=1e-6).validate()
        assert any("relaxed_tol" in e for e in errors)


class TestZesimConfig:
    """Tests for ZesimConfig."""

    def test_default_is_valid(self):
        """A default configuration validates."""
        config = ZesimConfig.create_default()
        assert config.validate() == []
        assert config.threads >= 1

    def test_save_and_load_yaml(self, tmp_path):
        """Settings survive a YAML round trip under the zesim key."""
        path = tmp_path / "zesim.yaml"
        config = ZesimConfig(config_path=str(path), threads=3, slack=1e-5)
        config.solver.max_iter = 80
        config.save()

        data = yaml.safe_load(path.read_text())
        assert data['zesim']['threads'] == 3

        loaded = ZesimConfig(config_path=str(path)).load()
        assert loaded.threads == 3
        assert loaded.slack == 1e-5
        assert loaded.solver.max_iter == 80
        assert loaded.solver.gap_tol == 1e-8

    def test_load_json_without_wrapper(self, tmp_path):
        """JSON files may omit the top-level key."""
        path = tmp_path / "zesim.json"
        path.write_text(json.dumps({'solver': {'gap_tol': 1e-7}, 'dimension_cap': 100}))
        config = ZesimConfig(config_path=str(path)).load()
        assert config.solver.gap_tol == 1e-7
        assert config.dimension_cap == 100

    def test_missing_file_keeps_defaults(self, tmp_path):
        """A missing file is not an error."""
        config = ZesimConfig(config_path=str(tmp_path / "none.yaml")).load()
        assert config.solver.max_iter == 200

    def test_unknown_solver_key(self, tmp_path):
        """A misspelled solver option is named in the error."""
        path = tmp_path / "zesim.yaml"
        path.write_text("solver:\n  gap_tol_typo: 1.0e-8\n")
        with pytest.raises(ConfigError, match="gap_tol_typo"):
            ZesimConfig(config_path=str(path)).load()

    def test_unknown_tolerance_key(self, tmp_path):
        """Tolerance sections are checked the same way."""
        path = tmp_path / "zesim.json"
        path.write_text(json.dumps({'tolerances': {'psd': 1e-9, 'pds': 1e-9}}))
        with pytest.raises(ConfigError, match="pds"):
            ZesimConfig(config_path=str(path)).load()

    def test_unknown_top_level_key(self, tmp_path):
        """Unknown top-level settings are rejected."""
        path = tmp_path / "zesim.yaml"
        path.write_text("zesim:\n  thread: 2\n")
        with pytest.raises(ConfigError, match="thread"):
            ZesimConfig(config_path=str(path)).load()

    @pytest.mark.parametrize("text", ["- 1\n- 2\n", "just text\n", "solver: 3\n"])
    def test_non_mapping(self, tmp_path, text):
        """Documents and sections must be mappings."""
        path = tmp_path / "zesim.yaml"
        path.write_text(text)
        with pytest.raises(ConfigError, match="mapping"):
            ZesimConfig(config_path=str(path)).load()

    def test_bad_value(self, tmp_path):
        """Values that do not convert are reported as configuration errors."""
        path = tmp_path / "zesim.json"
        path.write_text(json.dumps({'threads': 'many'}))
        with pytest.raises(ConfigError):
            ZesimConfig(config_path=str(path)).load()

    def test_unparsable_file(self, tmp_path):
        """Broken JSON is a configuration error."""
        path = tmp_path / "zesim.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="cannot parse"):
            ZesimConfig(config_path=str(path)).load()

    def test_yaml_exponent_strings(self, tmp_path):
        """YAML reads 1e-7 as a string; it is converted to a float."""
        path = tmp_path / "zesim.yaml"
        path.write_text("solver:\n  gap_tol: 1e-7\n  max_iter: 50\n")
        config = ZesimConfig(config_path=str(path)).load()
        assert config.solver.gap_tol == 1e-7
        assert config.solver.max_iter == 50
        assert config.validate() == []

    def test_save_without_path(self):
        """Saving needs a path."""
        with pytest.raises(ZesimError):
            ZesimConfig().save()

    def test_threads_from_env(self):
        """ZESIM_THREADS overrides the thread count."""
        config = ZesimConfig(threads=2).from_env({'ZESIM_THREADS': '7'})
        assert config.threads == 7

    @pytest.mark.parametrize("raw", ["zero", "0", "-2"])
    def test_threads_from_env_invalid(self, raw):
        """Non-integer or non-positive values are rejected."""
        with pytest.raises(ZesimError):
            ZesimConfig().from_env({'ZESIM_THREADS': raw})

    def test_load_config_rejects_invalid(self, tmp_path):
        """load_config validates what it reads."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({'slack': -1.0}))
        with pytest.raises(ZesimError, match="slack"):
            load_config(str(path))

    def test_load_config_reads_environment(self, monkeypatch):
        """load_config applies the environment."""
        monkeypatch.setenv('ZESIM_THREADS', '5')
        assert load_config().threads == 5


class TestPayloads:
    """Tests for the JSON payload schemas."""

    def test_matrix_payload(self):
        """Row-major real and imaginary parts."""
        payload = MatrixPayload(rows=2, cols=2, re=[1, 0, 0, 1], im=[0, -1, 1, 0])
        m = payload.to_array()
        assert m.shape == (2, 2)
        assert m[0, 1] == -1j
        assert m[1, 0] == 1j

    def test_matrix_payload_from_array(self):
        """from_array records shape and both parts."""
        m = np.array([[1, 2j, 3]])
        payload = MatrixPayload.from_array(m)
        assert (payload.rows, payload.cols) == (1, 3)
        assert payload.im == [0.0, 2.0, 0.0]

    def test_matrix_payload_wrong_length(self):
        """Entry count must match the shape."""
        with pytest.raises(PayloadError):
            parse_payload(MatrixPayload, {'rows': 2, 'cols': 2, 're': [1, 0, 0]})

    def test_graph_payload_needs_one_source(self):
        """Exactly one of kraus_basis and support_vectors."""
        with pytest.raises(PayloadError):
            parse_payload(GraphPayload, {'dimA': 2, 'dimB': 2})

    def test_graph_payload_kraus_shape(self):
        """Kraus matrices are dimB x dimA."""
        with pytest.raises(PayloadError):
            parse_payload(GraphPayload, {
                'dimA': 2, 'dimB': 3,
                'kraus_basis': [{'rows': 2, 'cols': 3, 're': [0] * 6}],
            })

    def test_graph_payload_vectors(self):
        """Support vectors are lists of (re, im) pairs."""
        payload = parse_payload(GraphPayload, {
            'dimA': 1, 'dimB': 2,
            'support_vectors': [[[1, 0], [0, 1]]],
        })
        assert np.allclose(payload.vector_arrays()[0], [1, 1j])

    def test_channel_payload_needs_kraus(self):
        """A channel has at least one Kraus operator."""
        with pytest.raises(PayloadError):
            parse_payload(ChannelPayload, {'dimA': 2, 'dimB': 2, 'kraus': []})

    def test_classical_payload_rectangular(self):
        """Ragged adjacency lists are rejected."""
        with pytest.raises(PayloadError):
            parse_payload(ClassicalGraphPayload, {'adjacency': [[True, False], [True]]})

    def test_certificate_payload_kind(self):
        """Lower certificates need S and U."""
        with pytest.raises(PayloadError):
            parse_payload(CertificatePayload, {
                'kind': 'lower',
                'S': {'rows': 1, 'cols': 1, 're': [1.0]},
            })
        with pytest.raises(PayloadError):
            parse_payload(CertificatePayload, {'kind': 'sideways'})

    def test_load_payload_missing_file(self, tmp_path):
        """Missing files raise PayloadError."""
        with pytest.raises(PayloadError, match="not found"):
            load_payload(ChannelPayload, str(tmp_path / "none.json"))

    def test_load_payload_bad_json(self, tmp_path):
        """Unparseable files raise PayloadError."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(PayloadError):
            load_payload(ChannelPayload, str(path))
