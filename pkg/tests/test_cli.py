import json

import pandas as pd
import pytest
from click.testing import CliRunner

from repscan import create_cli
from repscan.cli import run
from repscan.commands import scan as scan_command
from repscan.services import entropy
from repscan.services.data_service import data_service
from repscan.utils.system_monitor import SystemMonitor


@pytest.fixture(autouse=True)
def production_profile(monkeypatch):
    monkeypatch.delenv('REPSCAN_PROFILE', raising=False)


@pytest.fixture
def gauss_file(tmp_path):
    path = str(tmp_path / 'gauss.grid.json')
    assert run(['state', 'gaussian', '--out', path]) == 0
    return path


@pytest.fixture
def packet_file(tmp_path):
    path = str(tmp_path / 'packet.grid.json')
    assert run(['state', 'gaussian', '--wavefunction', '--out', path]) == 0
    return path


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_version():
    result = CliRunner().invoke(create_cli('testing'), ['--version'])
    assert result.exit_code == 0
    assert '0.1.0' in result.output


def test_entropy_matches_library(gauss_file, capsys):
    capsys.readouterr()
    assert run(['entropy', '--in', gauss_file, '--q', '2']) == 0
    payload = _stdout_json(capsys)
    d = data_service.load_grid(gauss_file)
    assert payload['entropies'][0]['renyi'] == entropy.renyi_entropy(d, 2.0).value
    assert payload['entropies'][0]['renyi_power'] == pytest.approx(1.0, abs=1e-5)


def test_verify_isoperimetric(gauss_file, tmp_path):
    out = tmp_path / 'report.json'
    assert run(['verify', '--in', gauss_file, '--suite', 'iso', '--q', '2', '--json', str(out)]) == 0
    reports = json.loads(out.read_text())
    assert len(reports) == 1
    assert reports[0]['satisfied'] is True
    assert set(reports[0]) == {'name', 'lhs', 'rhs', 'satisfied', 'slack', 'saturated'}


def test_verify_wavefunction_suites(packet_file, tmp_path):
    out = tmp_path / 'report.json'
    code = run(['verify', '--in', packet_file, '--wavefunction', '--suite', 'repur', '--q', '1,2',
                '--json', str(out)])
    assert code == 0
    reports = json.loads(out.read_text())
    assert [r['saturated'] for r in reports] == [True, True]


def test_verify_wavefunction_flag_needs_wavefunction(gauss_file, capsys):
    capsys.readouterr()
    assert run(['verify', '--in', gauss_file, '--wavefunction']) == 2
    assert capsys.readouterr().err.startswith('ConfigError:')


def test_unknown_flag_is_a_usage_error(gauss_file):
    assert run(['entropy', '--in', gauss_file, '--bogus']) == 2


def test_out_of_range_option_prints_one_line(gauss_file, capsys):
    capsys.readouterr()
    assert run(['cumulants', '--in', gauss_file, '--delta', '0.1']) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    assert err[0].startswith('ConfigError:')


def test_missing_input_is_a_computation_error(tmp_path, capsys):
    assert run(['entropy', '--in', str(tmp_path / 'absent.grid.json')]) == 1
    assert capsys.readouterr().err.startswith('GridFileError:')


def test_config_file_defaults_and_flag_precedence(gauss_file, tmp_path, capsys):
    config = tmp_path / 'repscan.json'
    config.write_text(json.dumps({'cumulants': {'m': 3, 'method': 'direct'}}))
    capsys.readouterr()
    assert run(['--config', str(config), 'cumulants', '--in', gauss_file]) == 0
    payload = _stdout_json(capsys)
    assert len(payload['values']) == 3
    assert payload['source'] == 'direct'
    assert run(['--config', str(config), 'cumulants', '--in', gauss_file, '--m', '4']) == 0
    assert len(_stdout_json(capsys)['values']) == 4


def test_power_curve_csv(gauss_file, tmp_path):
    out = tmp_path / 'curve.csv'
    assert run(['power-curve', '--in', gauss_file, '--m', '4', '--format', 'csv', '--out', str(out)]) == 0
    frame = data_service.read_csv(str(out))
    assert list(frame.columns) == ['k', 'order', 'N']
    assert frame['N'].tolist() == pytest.approx([1.0] * 4, abs=1e-5)


def test_infodist_and_moment_check(gauss_file, tmp_path, capsys):
    out = tmp_path / 'hist.csv'
    assert run(['infodist', '--in', gauss_file, '--bins', '64', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['center_bits', 'density']
    assert len(frame) == 64
    capsys.readouterr()
    assert run(['check-moment', '--in', gauss_file, '--p', '1.5,2']) == 0
    reports = _stdout_json(capsys)
    assert [r['satisfied'] for r in reports] == [True, True]


def test_conjugate_of_stored_packet(packet_file, tmp_path):
    out = tmp_path / 'momentum.grid.json'
    assert run(['state', 'conjugate', '--in', packet_file, '--out', str(out)]) == 0
    conjugate = data_service.load_grid(str(out))
    assert conjugate.spec.axes[0].count == 4 * 2048


def test_cat_state_file(tmp_path):
    out = tmp_path / 'ucs.grid.json'
    assert run(['state', 'cat', '--nu', '0.97', '--alpha', '10', '--grid', '-8:24:2048', '--out', str(out)]) == 0
    assert run(['state', 'cat', '--nu', '0.97', '--alpha', '10', '--out', str(tmp_path / 'x.grid.json')]) == 1


@pytest.mark.slow
def test_scan_outputs(tmp_path, capsys):
    grid_file = tmp_path / 'ucs.grid.json'
    assert run(['state', 'cat', '--nu', '0.97', '--alpha', '10', '--grid', '-8:24:2048', '--out', str(grid_file)]) == 0
    recon, truth = tmp_path / 'recon.csv', tmp_path / 'truth.csv'
    capsys.readouterr()
    assert run(['scan', '--in', str(grid_file), '--out', str(recon), '--truth', str(truth)]) == 0
    report = _stdout_json(capsys)
    assert len(report['kappa']) == 5
    assert report['l1'] < report['l1_reference_only']
    assert list(pd.read_csv(recon).columns) == ['x_bits', 'density']
    assert list(pd.read_csv(truth).columns) == ['center_bits', 'density']


@pytest.mark.slow
def test_figures_are_deterministic(tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert run(['figures', '--outdir', str(first)]) == 0
    assert run(['figures', '--outdir', str(second)]) == 0
    for name in ('fig1_bcs_density.csv', 'fig2_ucs_scan.csv'):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    density_table = pd.read_csv(first / 'fig1_bcs_density.csv')
    density = density_table['density'].to_numpy()
    peaks = (density[1:-1] > density[:-2]) & (density[1:-1] >= density[2:])
    assert peaks.sum() == 2
    scan_table = pd.read_csv(first / 'fig2_ucs_scan.csv')
    assert list(scan_table.columns) == ['center_bits', 'target', 'reconstruction', 'reference']
    width = scan_table['center_bits'].iloc[1] - scan_table['center_bits'].iloc[0]
    assert scan_table['reconstruction'].sum() * width == pytest.approx(1.0, abs=0.05)


def test_verify_with_no_applicable_order_is_a_usage_error(gauss_file, capsys):
    capsys.readouterr()
    assert run(['verify', '--in', gauss_file, '--suite', 'iso', '--q', '0.5']) == 2
    assert capsys.readouterr().err.startswith('ConfigError:')


def test_verify_lambda_outside_unit_interval(gauss_file, capsys):
    capsys.readouterr()
    assert run(['verify', '--in', gauss_file, '--suite', 'epi', '--q', '2', '--lambda', '1.5']) == 2
    assert capsys.readouterr().err.startswith('ConfigError:')


def test_verify_epi_with_partner(gauss_file, tmp_path):
    partner = str(tmp_path / 'partner.grid.json')
    assert run(['state', 'gaussian', '--out', partner]) == 0
    out = tmp_path / 'report.json'
    assert run(['verify', '--in', gauss_file, '--suite', 'epi', '--q', '2', '--partner', partner,
                '--lambda', '0.25', '--json', str(out)]) == 0
    reports = json.loads(out.read_text())
    assert [r['name'] for r in reports] == ['epi(lambda=0.25, r=2)', 'epi_pair(lambda=0.25, r=2)']
    assert all(r['satisfied'] for r in reports)


def test_verify_repur_variants(packet_file, tmp_path):
    out = tmp_path / 'report.json'
    assert run(['verify', '--in', packet_file, '--wavefunction', '--suite', 'repur', '--q', '2',
                '--repur-variant', 'renyi', '--repur-variant', 'tsallis_swapped', '--json', str(out)]) == 0
    reports = json.loads(out.read_text())
    assert [r['name'].endswith(kind) for r, kind in zip(reports, ('renyi)', 'tsallis)'))] == [True, True]
    assert all(r['satisfied'] for r in reports)


def test_grid_too_large_for_memory(gauss_file, monkeypatch, capsys):
    monkeypatch.setattr(SystemMonitor, 'check_memory', lambda self, total_points: False)
    capsys.readouterr()
    assert run(['entropy', '--in', gauss_file]) == 1
    assert capsys.readouterr().err.startswith('InsufficientMemory:')


def test_figure_file_names(tmp_path, monkeypatch):
    density_table = pd.DataFrame({'x': [0.0, 1.0], 'density': [0.5, 0.5]})
    scan_table = pd.DataFrame({'center_bits': [0.0], 'target': [1.0], 'reconstruction': [1.0], 'reference': [1.0]})
    monkeypatch.setattr(scan_command, 'figure_frames',
                        lambda workers=1: (density_table, scan_table, {'l1': 0.1, 'l1_reference_only': 0.2}))
    assert run(['figures', '--outdir', str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ['fig1_bcs_density.csv', 'fig2_ucs_scan.csv']
    assert list(pd.read_csv(tmp_path / 'fig2_ucs_scan.csv').columns) == list(scan_table.columns)
