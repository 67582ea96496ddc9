import textwrap

import pytest

from ctokit.corpus import (
    CANONICAL_PARTIES,
    COALITIONS_BY_LP,
    contribution_record,
    load_party_aliases,
    normalize_party,
    parse_protocol,
    party_affiliation,
    protocols_from_records,
    write_corpus,
    read_corpus_records,
)
from ctokit.errors import ProtocolParseError, ProtocolSchemaError
from ctokit.segmentation import normalize_whitespace

THREE_SPEECH_XML = textwrap.dedent(
    """\
    <protocol lp="5" session="20" date="1966-11-30">
      <speech speaker="Eugen Gerstenmaier" role="president">Ich eröffne die Sitzung.</speech>
      <speech speaker="Herbert Wehner" party="SPD" role="member">Das ist falsch. Völlig falsch!</speech>
      <speech speaker="Kurt Birrenbach" party="CDU" role="member">Ich widerspreche.</speech>
    </protocol>
    """
)


def test_three_speech_fixture():
    protocol = parse_protocol(THREE_SPEECH_XML)
    assert protocol.legislative_period == 5
    assert protocol.session_number == 20
    assert protocol.date.isoformat() == "1966-11-30"
    assert [c.role for c in protocol.contributions] == ["president", "member", "member"]
    assert [c.index for c in protocol.contributions] == [0, 1, 2]
    assert protocol.contributions[1].speaker_party == "SPD"
    assert protocol.contributions[2].speaker_party == "CDU/CSU"
    assert len(protocol.contributions[1].sentences) == 2


def test_empty_body():
    protocol = parse_protocol('<protocol lp="3" session="7" date="1958-01-01"></protocol>')
    assert protocol.contributions == ()


def test_missing_date_is_schema_error():
    with pytest.raises(ProtocolSchemaError) as err:
        parse_protocol('<protocol lp="3" session="7"><speech speaker="X">Hi.</speech></protocol>')
    assert err.value.field == "date"


@pytest.mark.parametrize("attr", ["lp", "session"])
def test_missing_session_metadata(attr):
    attrs = {"lp": 'lp="1"', "session": 'session="2"', "date": 'date="1950-01-01"'}
    del attrs[attr]
    xml = f"<protocol {' '.join(attrs.values())}></protocol>"
    with pytest.raises(ProtocolSchemaError) as err:
        parse_protocol(xml)
    assert attr in err.value.field


def test_malformed_xml_reports_position():
    with pytest.raises(ProtocolParseError) as err:
        parse_protocol("<protocol lp='1' session='1' date='1950-01-01'><speech></protocol>")
    assert err.value.line is not None


def test_missing_speaker_is_schema_error():
    xml = '<protocol lp="1" session="1" date="1950-01-01"><speech>Hi.</speech></protocol>'
    with pytest.raises(ProtocolSchemaError) as err:
        parse_protocol(xml)
    assert err.value.field == "speaker"


def test_unknown_party_maps_to_absent():
    xml = textwrap.dedent(
        """\
        <protocol lp="1" session="1" date="1950-01-01">
          <speech speaker="A" party="Mondpartei">Text.</speech>
          <speech speaker="B">Text.</speech>
        </protocol>
        """
    )
    protocol = parse_protocol(xml)
    assert protocol.contributions[0].speaker_party is None
    assert protocol.contributions[1].speaker_party is None


def test_role_aliases_and_default():
    xml = textwrap.dedent(
        """\
        <protocol lp="1" session="1" date="1950-01-01">
          <speech speaker="A" role="presidency">X.</speech>
          <speech speaker="B" role="mp">X.</speech>
          <speech speaker="C">X.</speech>
          <speech speaker="D" role="clerk">X.</speech>
        </protocol>
        """
    )
    roles = [c.role for c in parse_protocol(xml).contributions]
    assert roles == ["president", "member", "member", "other"]


def test_agenda_position_defaults_to_document_order():
    protocol = parse_protocol(THREE_SPEECH_XML)
    assert [c.agenda_position for c in protocol.contributions] == [0, 1, 2]


def test_agenda_attribute_override():
    xml = '<protocol lp="1" session="1" date="1950-01-01"><speech speaker="A" agenda="7">X.</speech></protocol>'
    assert parse_protocol(xml).contributions[0].agenda_position == 7


def test_sentence_round_trip_over_contributions():
    protocol = parse_protocol(THREE_SPEECH_XML)
    for contribution in protocol.contributions:
        joined = " ".join(s.text for s in contribution.sentences)
        assert normalize_whitespace(joined) == normalize_whitespace(contribution.raw_text)


def test_parse_is_deterministic():
    assert parse_protocol(THREE_SPEECH_XML) == parse_protocol(THREE_SPEECH_XML)


def test_corpus_jsonl_round_trip(tmp_path):
    protocol = parse_protocol(THREE_SPEECH_XML)
    path = tmp_path / "corpus.jsonl"
    count = write_corpus([protocol], path)
    assert count == 3
    restored = protocols_from_records(read_corpus_records(path))
    assert restored == [protocol]


def test_contribution_record_field_names():
    protocol = parse_protocol(THREE_SPEECH_XML)
    record = contribution_record(protocol, protocol.contributions[0])
    assert set(record) == {
        "lp",
        "session",
        "date",
        "index",
        "speaker",
        "party",
        "role",
        "agenda_position",
        "text",
        "sentences",
    }


def test_party_normalization_aliases():
    assert normalize_party("CSU") == "CDU/CSU"
    assert normalize_party("Bündnis 90/Die Grünen") == "GRÜNE"
    assert normalize_party("PDS") == "LINKE/PDS"
    assert normalize_party(None) is None
    assert normalize_party("unbekannt") is None


def test_party_alias_file(tmp_path):
    path = tmp_path / "aliases.txt"
    path.write_text("Mondpartei = other\n# comment\n", encoding="utf-8")
    table = load_party_aliases(path)
    assert normalize_party("Mondpartei", table) == "other"
    assert normalize_party("SPD", table) == "SPD"


def test_coalition_table_covers_all_19_lps():
    assert sorted(COALITIONS_BY_LP) == list(range(1, 20))
    for parties in COALITIONS_BY_LP.values():
        assert parties <= set(CANONICAL_PARTIES)


def test_party_affiliation():
    assert party_affiliation("SPD", 14) == "coalition"
    assert party_affiliation("CDU/CSU", 14) == "opposition"
    assert party_affiliation(None, 14) is None
    assert party_affiliation("SPD", 99) is None
