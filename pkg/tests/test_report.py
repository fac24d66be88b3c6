import math

import pytest

from unilab.repositories import report_repository


@pytest.mark.parametrize(
    ('value', 'cell'),
    [
        (0.1, '0.1'),
        (1 / 3, '0.3333333333333333'),
        (math.inf, 'inf'),
        (True, 'true'),
        (None, ''),
        (12, '12'),
    ],
)
def test_format_cell(value, cell):
    assert report_repository.format_cell(value) == cell


def test_render_csv_keeps_column_order():
    text = report_repository.render_csv(
        ['N', 'U'], [{'U': 2.5, 'N': 1}, {'N': 2}]
    )
    assert text == 'N,U\n1,2.5\n2,\n'


def test_write_text_leaves_no_partial_file(tmp_path):
    path = tmp_path / 'out' / 'report.csv'
    report_repository.write_text(path, 'N\n1\n')

    assert path.read_text(encoding='utf-8') == 'N\n1\n'
    assert [p.name for p in path.parent.iterdir()] == ['report.csv']


def test_document_carries_version_and_seeds():
    document = report_repository.build_document(
        'unicity', {'seed': 3}, {'seed': 3}, {'U': 1.0}
    )
    assert document['tool'] == 'unilab'
    assert document['seeds'] == {'seed': 3}
    assert 'version' in document
