import pytest

from conftest import ENGLISH_HEADER, HINDI_HEADER, csv_text, write_csv
from constants import EMOTION_LABELS
from emotion_data import (
    Dataset,
    LabelSchema,
    Sample,
    dataset_to_csv,
    infer_schema,
    load_dataset,
    load_split_files,
    read_header,
    save_dataset,
    split_from_path,
    split_stats,
)
from errors import (
    MissingTextColumn,
    ParseError,
    SchemaMismatch,
    TooFewEmotionColumns,
    UnknownColumn,
)


# --- Schemas ---
def test_infer_schema_six_labels():
    schema = infer_schema(["text", *EMOTION_LABELS], "hin")
    assert schema.labels == EMOTION_LABELS
    assert schema.language == "hin"


def test_infer_schema_english_has_no_disgust():
    schema = infer_schema(["text", "anger", "fear", "joy", "sadness", "surprise"], "eng")
    assert len(schema) == 5
    assert "disgust" not in schema.labels


def test_infer_schema_canonical_order_and_case():
    schema = infer_schema(["Surprise", "Joy", "TEXT", "anger", "fear", "sadness", "disgust", "id"], "deu")
    assert schema.labels == EMOTION_LABELS


def test_infer_schema_errors():
    with pytest.raises(TooFewEmotionColumns):
        infer_schema(["text", "anger"], "hin")
    with pytest.raises(MissingTextColumn):
        infer_schema(list(EMOTION_LABELS), "hin")
    with pytest.raises(UnknownColumn):
        infer_schema(["text", "intensity", *EMOTION_LABELS], "hin")


def test_label_schema_rejects_bad_orders():
    with pytest.raises(SchemaMismatch):
        LabelSchema("hin", ("disgust", "anger", "fear", "joy", "sadness"))
    with pytest.raises(SchemaMismatch):
        LabelSchema("hin", ("anger", "fear", "joy", "sadness"))


def test_default_schema():
    assert LabelSchema.default("eng").labels == ("anger", "fear", "joy", "sadness", "surprise")
    assert LabelSchema.default("hin").labels == EMOTION_LABELS


# --- Loading ---
def test_load_english_row(english_csv):
    schema = infer_schema(read_header(english_csv), "eng")
    dataset = load_dataset(english_csv, schema, "train")
    first = dataset.samples[0]
    assert first.text == "Colorado, middle of nowhere."
    assert first.labels == (0, 1, 0, 0, 1)
    assert first.key == "eng_train_0001"
    assert dict(first.extras) == {"id": "eng_train_0001"}


def test_load_devanagari_all_zero_row(hindi_csv):
    dataset = load_dataset(hindi_csv, LabelSchema.default("hin"), "train")
    assert dataset.samples[1].text == "वह अपने दोस्तों के साथ मूवी देखने गई थी।"
    assert dataset.samples[1].labels == (0, 0, 0, 0, 0, 0)
    assert len(dataset) == 3


def test_round_trip_is_byte_identical(hindi_csv, english_csv, tmp_path):
    for path, language in ((hindi_csv, "hin"), (english_csv, "eng")):
        dataset = load_dataset(path, infer_schema(read_header(path), language), "train")
        out = tmp_path / f"copy_{path.name}"
        save_dataset(dataset, out)
        assert out.read_bytes() == path.read_bytes()


def test_keys_fall_back_to_row_index(tmp_path):
    header = ["text", *EMOTION_LABELS]
    path = write_csv(tmp_path / "noid.csv", header, [["a", *"000000"], ["b", *"100000"]])
    dataset = load_dataset(path, LabelSchema.default("hin"), "dev")
    assert dataset.keys == ["dev-0", "dev-1"]
    assert dataset_to_csv(dataset) == csv_text(header, [["a", *"000000"], ["b", *"100000"]])


def test_row_keys_do_not_collide_across_splits(tmp_path):
    header = ["text", *EMOTION_LABELS]
    train = write_csv(tmp_path / "train.csv", header, [["a", *"000000"], ["b", *"100000"]])
    dev = write_csv(tmp_path / "dev.csv", header, [["c", *"010000"]])
    splits = load_split_files({"train": train, "dev": dev}, "hin")
    assert splits["train"].keys == ["train-0", "train-1"]
    assert splits["dev"].keys == ["dev-0"]


def test_split_from_path():
    assert split_from_path("data/hin_dev.csv", "train") == "dev"
    assert split_from_path("eng-test.csv", "train") == "test"
    assert split_from_path("corpus.csv", "train") == "train"
    assert split_from_path("train_dev.csv", "test") == "test"


@pytest.mark.parametrize("cell", ["2", "0.5", "", "yes"])
def test_bad_label_cell_is_parse_error(tmp_path, cell):
    path = write_csv(tmp_path / "bad.csv", HINDI_HEADER, [["x1", "hello", "0", cell, "0", "0", "0", "0"]])
    with pytest.raises(ParseError) as info:
        load_dataset(path, LabelSchema.default("hin"), "train")
    assert info.value.row == 1
    assert info.value.column == "disgust"


def test_label_cells_are_trimmed(tmp_path):
    path = write_csv(tmp_path / "pad.csv", HINDI_HEADER, [["x1", "hello", " 1 ", "0", "0", "0", "0", "0"]])
    assert load_dataset(path, LabelSchema.default("hin"), "train").samples[0].labels[0] == 1


def test_empty_text_is_rejected(tmp_path):
    path = write_csv(tmp_path / "empty.csv", HINDI_HEADER, [["x1", "   ", *"000000"]])
    with pytest.raises(ParseError):
        load_dataset(path, LabelSchema.default("hin"), "train")


def test_duplicate_keys_are_rejected(tmp_path):
    path = write_csv(tmp_path / "dup.csv", HINDI_HEADER, [["x1", "a", *"000000"], ["x1", "b", *"000000"]])
    with pytest.raises(ParseError):
        load_dataset(path, LabelSchema.default("hin"), "train")


def test_schema_mismatch_between_file_and_schema(english_csv):
    with pytest.raises(SchemaMismatch):
        load_dataset(english_csv, LabelSchema.default("hin"), "test")


def test_dataset_rejects_wrong_label_width():
    schema = LabelSchema.default("eng")
    with pytest.raises(SchemaMismatch):
        Dataset(schema, (Sample("hi", (0, 1), "k"),), "train")


def test_load_split_files_requires_shared_schema(hindi_csv, english_csv):
    with pytest.raises(SchemaMismatch):
        load_split_files({"train": hindi_csv, "dev": english_csv}, "hin")


# --- Split statistics ---
def test_split_stats_hindi_counts(make_split_csv):
    paths = {
        "train": make_split_csv("hin_train", 2556),
        "dev": make_split_csv("hin_dev", 100),
        "test": make_split_csv("hin_test", 1010),
    }
    stats = split_stats(load_split_files(paths, "hin").values())
    assert stats.split_counts == {"train": 2556, "dev": 100, "test": 1010}
    assert stats.total == 3666


def test_split_stats_english_counts(make_split_csv):
    paths = {
        "train": make_split_csv("eng_train", 2768, ENGLISH_HEADER),
        "dev": make_split_csv("eng_dev", 116, ENGLISH_HEADER),
        "test": make_split_csv("eng_test", 2767, ENGLISH_HEADER),
    }
    stats = split_stats(load_split_files(paths, "eng").values())
    assert stats.split_counts == {"train": 2768, "dev": 116, "test": 2767}
    assert stats.total == 5651
    assert stats.labels == ("anger", "fear", "joy", "sadness", "surprise")


def test_split_stats_positive_counts(hindi_csv):
    stats = split_stats([load_dataset(hindi_csv, LabelSchema.default("hin"), "train")])
    assert stats.label_positives["train"]["joy"] == 1
    assert stats.positives("surprise") == 1
    assert stats.positives("anger") == 0


def test_split_stats_empty_list():
    stats = split_stats([])
    assert stats.total == 0
    assert set(stats.split_counts.values()) == {0}


def test_split_stats_rejects_mixed_schemas(hindi_csv, english_csv):
    hin = load_dataset(hindi_csv, LabelSchema.default("hin"), "train")
    eng = load_dataset(english_csv, LabelSchema.default("eng"), "train")
    with pytest.raises(SchemaMismatch):
        split_stats([hin, eng])
