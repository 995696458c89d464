# file: tests/test_cli.py
import os
import subprocess
import sys

import numpy as np
import pandas as pd
import pytest

# Add the parent directory to sys.path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import run
from scfcodec.core.bitstream import BitstreamHeader
from scfcodec.core.image import Image, read_ppm, write_ppm

RUN_SCRIPT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'run.py'))


@pytest.fixture
def ppm_path(tmp_path):
    rng = np.random.default_rng(4)
    palette = rng.integers(0, 256, size=(4, 3))
    pixels = palette[rng.integers(0, 4, size=(10, 14))]
    pixels[6:, 8:] = rng.integers(0, 256, size=(4, 6, 3))
    path = tmp_path / 'in.ppm'
    write_ppm(path, Image(pixels))
    return path


class TestEncodeDecode:
    """encode and decode verbs"""

    def test_round_trip(self, ppm_path, tmp_path):
        scf = tmp_path / 'out.scf'
        back = tmp_path / 'back.ppm'

        assert run.main(['encode', str(ppm_path), str(scf)]) == run.EXIT_OK
        assert run.main(['decode', str(scf), str(back)]) == run.EXIT_OK
        assert read_ppm(back) == read_ppm(ppm_path)
        assert back.read_bytes() == ppm_path.read_bytes()

    def test_baseline_flags(self, ppm_path, tmp_path):
        scf = tmp_path / 'base.scf'
        back = tmp_path / 'back.ppm'

        assert run.main(['encode', str(ppm_path), str(scf), '--no-stage3-pruning', '--no-escape-ctx']) == 0
        assert BitstreamHeader.unpack(scf.read_bytes()).config.label == 'baseline'
        assert run.main(['decode', str(scf), str(back)]) == 0
        assert read_ppm(back) == read_ppm(ppm_path)

    def test_tolerance_and_exclusion_are_stored(self, ppm_path, tmp_path):
        scf = tmp_path / 'tol.scf'
        assert run.main(['encode', str(ppm_path), str(scf), '--tolerance', '2', '--exclude-stage1-colors']) == 0

        cfg = BitstreamHeader.unpack(scf.read_bytes()).config
        assert cfg.similarity_tolerance == 2
        assert cfg.exclude_stage1_colors

    def test_stats_csv(self, ppm_path, tmp_path):
        stats = tmp_path / 'stats.csv'
        assert run.main(['encode', str(ppm_path), str(tmp_path / 'o.scf'), '--stats', str(stats)]) == 0

        frame = pd.read_csv(stats)
        assert len(frame) == 1
        assert frame.loc[0, 'config'] == 'both'
        assert frame.loc[0, 'stage1_pixels'] + frame.loc[0, 'stage2_pixels'] + frame.loc[0, 'stage3_pixels'] == 140

    def test_config_from_environment(self, ppm_path, tmp_path, mocker):
        mocker.patch.dict(os.environ, {'SCF_ESCAPE_CTX': 'false'})
        scf = tmp_path / 'env.scf'
        assert run.main(['encode', str(ppm_path), str(scf)]) == 0
        assert BitstreamHeader.unpack(scf.read_bytes()).config.label == 'stage3_only'


class TestExitCodes:
    """Errors map onto exit codes"""

    def test_missing_input(self, tmp_path):
        assert run.main(['encode', str(tmp_path / 'nope.ppm'), str(tmp_path / 'o.scf')]) == run.EXIT_IO

    def test_bad_ppm(self, tmp_path):
        bad = tmp_path / 'bad.ppm'
        bad.write_bytes(b'P3\n1 1\n255\n0 0 0\n')
        assert run.main(['encode', str(bad), str(tmp_path / 'o.scf')]) == run.EXIT_IO

    def test_decode_non_scf(self, ppm_path, tmp_path):
        assert run.main(['decode', str(ppm_path), str(tmp_path / 'o.ppm')]) == run.EXIT_CORRUPT

    def test_decode_truncated(self, ppm_path, tmp_path):
        scf = tmp_path / 'o.scf'
        run.main(['encode', str(ppm_path), str(scf)])
        scf.write_bytes(scf.read_bytes()[:-2])
        assert run.main(['decode', str(scf), str(tmp_path / 'o.ppm')]) == run.EXIT_CORRUPT

    def test_unknown_verb(self):
        with pytest.raises(SystemExit) as exc:
            run.main(['compress', 'a', 'b'])
        assert exc.value.code == run.EXIT_USAGE

    def test_missing_argument(self):
        with pytest.raises(SystemExit) as exc:
            run.main(['encode', 'only-one'])
        assert exc.value.code == run.EXIT_USAGE

    def test_bad_env_value(self, ppm_path, tmp_path, mocker):
        mocker.patch.dict(os.environ, {'SCF_TOLERANCE': 'wide'})
        assert run.main(['encode', str(ppm_path), str(tmp_path / 'o.scf')]) == run.EXIT_USAGE

    def test_unexpected_error_is_logged(self, ppm_path, tmp_path, mocker):
        mocker.patch.object(run, 'read_ppm', side_effect=RuntimeError('boom'))
        log = mocker.patch.object(run.logger, 'exception')

        assert run.main(['encode', str(ppm_path), str(tmp_path / 'o.scf')]) == run.EXIT_USAGE
        log.assert_called_once()
        assert 'boom' in log.call_args[0][0]


class TestInspect:
    """inspect verb"""

    def test_inspect_ppm(self, ppm_path, capsys):
        assert run.main(['inspect', str(ppm_path)]) == 0
        out = capsys.readouterr().out
        assert '14x10' in out
        assert 'escape contexts' in out
        assert 'residual threshold t = 7' in out

    def test_inspect_scf_uses_header_config(self, ppm_path, tmp_path, capsys):
        scf = tmp_path / 'o.scf'
        run.main(['encode', str(ppm_path), str(scf), '--no-escape-ctx'])
        capsys.readouterr()

        assert run.main(['inspect', str(scf)]) == 0
        assert '(stage3_only)' in capsys.readouterr().out


class TestCorpusAndBench:
    """gen-corpus and bench verbs"""

    def test_gen_corpus_is_deterministic(self, tmp_path):
        args = ['--seed', '5', '--count', '3', '--min-size', '8', '--max-size', '12']
        assert run.main(['gen-corpus', str(tmp_path / 'a')] + args) == 0
        assert run.main(['gen-corpus', str(tmp_path / 'b')] + args) == 0

        for name in ('img_0000.ppm', 'img_0002.ppm', 'manifest.txt'):
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()

    def test_bench(self, tmp_path, capsys):
        run.main(['gen-corpus', str(tmp_path / 'c'), '--count', '2', '--min-size', '8', '--max-size', '10'])
        out = tmp_path / 'report.csv'

        assert run.main(['bench', str(tmp_path / 'c'), '--out', str(out)]) == 0
        assert out.exists()
        assert (tmp_path / 'report_summary.csv').exists()
        assert 'both_pct' in capsys.readouterr().out

    def test_bench_missing_corpus(self, tmp_path):
        assert run.main(['bench', str(tmp_path / 'empty')]) == run.EXIT_IO

    def test_bench_tolerance_from_environment(self, tmp_path, mocker):
        mocker.patch.dict(os.environ, {'SCF_TOLERANCE': '3'})
        bench = mocker.patch.object(run, 'run_bench')

        run.main(['bench', str(tmp_path / 'c'), '--out', str(tmp_path / 'r.csv')])
        assert bench.call_args.kwargs['tolerance'] == 3

    def test_bench_tolerance_flag_wins(self, tmp_path, mocker):
        mocker.patch.dict(os.environ, {'SCF_TOLERANCE': '3'})
        bench = mocker.patch.object(run, 'run_bench')

        run.main(['bench', str(tmp_path / 'c'), '--out', str(tmp_path / 'r.csv'), '--tolerance', '1'])
        assert bench.call_args.kwargs['tolerance'] == 1


class TestDotenv:
    """Settings from a .env file in the working directory"""

    def run_cli(self, cwd, *argv):
        env = {k: v for k, v in os.environ.items() if not k.startswith('LOG_') and k != 'ENV'}
        return subprocess.run([sys.executable, RUN_SCRIPT, *argv], cwd=cwd, env=env,
                              capture_output=True, text=True, timeout=120)

    def test_log_to_file_disabled_by_dotenv(self, tmp_path):
        (tmp_path / '.env').write_text('LOG_TO_FILE=false\n')

        result = self.run_cli(tmp_path, 'gen-corpus', 'corpus', '--count', '1', '--min-size', '8', '--max-size', '8')
        assert result.returncode == 0, result.stderr
        assert (tmp_path / 'corpus' / 'img_0000.ppm').exists()
        assert not (tmp_path / 'logs').exists()

    def test_log_dir_from_dotenv(self, tmp_path):
        (tmp_path / '.env').write_text('LOG_TO_FILE=true\nLOG_DIR=run_logs\n')

        result = self.run_cli(tmp_path, 'gen-corpus', 'corpus', '--count', '1', '--min-size', '8', '--max-size', '8')
        assert result.returncode == 0, result.stderr
        assert (tmp_path / 'run_logs' / 'scfcodec.log').exists()
        assert not (tmp_path / 'logs').exists()
