import json
from pathlib import Path

import pytest

from tests.factories import experiment_factory
from unilab.exceptions import EXPERIMENT_FAILURE, USAGE_FAILURE
from unilab.services import cipher_service

CORPUS_PATH = Path(__file__).parent / 'data' / 'corpus.txt'


def test_unicity_report(run_cli):
    code, out, _ = run_cli('unicity', '-D', 3.2, '--seed', 1)
    document = json.loads(out)

    assert code == 0
    assert document['command'] == 'unicity'
    assert document['seeds'] == {'seed': 1}
    assert document['result']['U'] == pytest.approx(27.62, abs=0.01)


def test_unicity_for_shift(run_cli):
    _, out, _ = run_cli('unicity', '--cipher', 'shift', '-D', 3.2)
    assert json.loads(out)['result']['U'] == pytest.approx(1.47, abs=0.01)


def test_unicity_without_redundancy_is_unbounded(run_cli):
    code, out, _ = run_cli('unicity', '-D', 0)
    assert code == 0
    assert json.loads(out)['result']['U'] == 'unbounded'


def test_unicity_csv(run_cli):
    code, out, _ = run_cli(
        'unicity', '-D', 3.2, '--lengths', 0, 10, '--format', 'csv'
    )
    lines = out.splitlines()

    assert code == 0
    assert lines[0].startswith('# tool=unilab')
    assert lines[1].startswith('# config=')
    assert lines[2] == (
        'N,H_K_bits,D_bits_per_letter,expected_spurious_log2,'
        'expected_spurious,U'
    )
    assert len(lines) == 5


def test_unicity_from_corpus(run_cli):
    code, out, _ = run_cli(
        'unicity', '--corpus', CORPUS_PATH, '--order', 2, '--lengths', 30
    )
    result = json.loads(out)['result']
    assert code == 0
    assert result['D'] > 0


def test_corpus_stats(run_cli, tmp_path):
    model_path = tmp_path / 'model.json'
    code, out, _ = run_cli(
        'corpus-stats',
        CORPUS_PATH,
        '--orders',
        1,
        2,
        '--save-model',
        model_path,
    )
    result = json.loads(out)['result']

    assert code == 0
    assert [e['order'] for e in result['estimates']] == [1, 2]
    assert result['estimates'][1]['D'] > result['estimates'][0]['D']
    assert sum(result['symbol_counts'].values()) == result['symbols']
    assert json.loads(model_path.read_text())['order'] == 2


def test_missing_corpus(run_cli, tmp_path):
    code, out, err = run_cli('corpus-stats', tmp_path / 'absent.txt')
    assert code == USAGE_FAILURE
    assert not out
    assert 'absent.txt' in err


def test_empty_corpus(run_cli, tmp_path):
    path = tmp_path / 'digits.txt'
    path.write_text('0123 4567\n', encoding='utf-8')
    code, _, err = run_cli('corpus-stats', path)
    assert code == EXPERIMENT_FAILURE
    assert 'error' in err


def test_spurious_is_reproducible(run_cli):
    argv = ('spurious', '--construction-seeds', 10, '--seed', 42)
    _, first, _ = run_cli(*argv, '--format', 'csv')
    _, again, _ = run_cli(*argv, '--format', 'csv')
    assert first == again
    assert first.splitlines()[2].startswith('N,H_K_bits,D_bits_per_letter')


@pytest.mark.parametrize('count', [1, 2])
def test_spurious_failure_ignores_worker_count(run_cli, count):
    code, out, err = run_cli('spurious', '-R', 3, '--workers', count)
    assert code == EXPERIMENT_FAILURE
    assert not out
    assert 'meaningful messages' in err


def test_spurious_monte_carlo(run_cli):
    code, out, _ = run_cli(
        'spurious', '--monte-carlo', '--trials', 5, '--seed', 3
    )
    experiment = json.loads(out)['result']['experiments'][0]
    assert code == 0
    assert experiment['trials'] == 5


def test_spurious_above_enumeration_cap(run_cli):
    code, out, err = run_cli(
        'spurious', '--corpus', CORPUS_PATH, '--alphabet', 'latin'
    )
    assert code == EXPERIMENT_FAILURE
    assert not out
    assert '--monte-carlo' in err


def test_channel_csv(run_cli):
    code, out, _ = run_cli(
        'channel', '--lengths', 1, 2, 3, '--format', 'csv', '--seed', 5
    )
    lines = out.splitlines()
    assert code == 0
    assert lines[2] == 'N,I_theoretical,I_empA,I_empB,reliable,N_min,clamped'
    assert len(lines) == 6


def test_config_file_with_override(run_cli, tmp_path):
    config = experiment_factory.ExperimentConfigFactory()
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(config), encoding='utf-8')

    code, out, _ = run_cli('channel', '--config', path, '--lengths', 2)
    document = json.loads(out)

    assert code == 0
    assert document['config']['seed'] == config['seed']
    assert document['config']['channel']['lengths'] == [2]
    assert [r['N'] for r in document['result']['reports']] == [2]


def test_config_with_unknown_field(run_cli, tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'sede': 4}), encoding='utf-8')
    code, _, err = run_cli('unicity', '--config', path)
    assert code == USAGE_FAILURE
    assert 'config' in err


def test_invalid_parameter(run_cli):
    code, _, _ = run_cli('channel', '-R', -1)
    assert code == USAGE_FAILURE


def test_out_file(run_cli, tmp_path):
    path = tmp_path / 'reports' / 'unicity.json'
    code, out, _ = run_cli('unicity', '-D', 3.2, '--out', path)
    assert code == 0
    assert not out
    assert json.loads(path.read_text())['command'] == 'unicity'


def test_auto_seed_is_recorded(run_cli):
    _, out, _ = run_cli('channel', '--lengths', 1)
    document = json.loads(out)
    assert isinstance(document['seeds']['seed'], int)
    assert document['config']['seed'] == document['seeds']['seed']


def test_attack_single_ciphertext(run_cli, english, latin, create_key):
    key = create_key()
    ciphertext = cipher_service.encrypt(key, english[-600:], latin)
    code, out, _ = run_cli(
        'attack',
        '--corpus',
        CORPUS_PATH,
        '--ciphertext',
        ciphertext,
        '--key',
        cipher_service.key_to_string(key, latin),
        '--iterations',
        500,
        '--restarts',
        0,
        '--seed',
        9,
    )
    result = json.loads(out)['result']
    assert code == 0
    assert len(result['best_key']) == latin.G
    assert 0 <= result['plaintext_accuracy'] <= 1


def test_attack_needs_a_target(run_cli):
    code, _, err = run_cli('attack', '--corpus', CORPUS_PATH)
    assert code == USAGE_FAILURE
    assert 'ciphertext' in err


def test_attack_curve_too_long(run_cli):
    code, _, _ = run_cli(
        'attack', '--corpus', CORPUS_PATH, '--lengths', 100_000
    )
    assert code == EXPERIMENT_FAILURE
