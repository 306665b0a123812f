import pytest

from embeddings import HashingEmbedder, attach_embeddings
from emotion_data import load_split_files
from head import TrainConfig
from workers import SeedJob, SeedRunner, run_seed


@pytest.fixture
def seed_jobs(separable_corpus, hash_config, tmp_path):
    embedder = HashingEmbedder(hash_config)
    splits = load_split_files({"train": separable_corpus["train"], "dev": separable_corpus["dev"]}, "und")
    train = attach_embeddings(splits["train"], embedder)
    dev = attach_embeddings(splits["dev"], embedder)
    config = TrainConfig(learning_rate=1e-2, max_epochs=3, patience=2)

    def make(out_dir=None):
        return [
            SeedJob(
                seed=seed,
                train=train,
                dev=dev,
                schema=splits["train"].schema,
                config=config,
                out_path=None if out_dir is None else out_dir / f"seed_{seed}.model.yaml",
            )
            for seed in (0, 1, 2)
        ]

    return make


def test_run_seed_writes_checkpoint(seed_jobs, tmp_path):
    job = seed_jobs(tmp_path)[0]
    result = run_seed(job)
    assert result.seed == 0
    assert result.model.config.seed == 0
    assert result.checkpoint.is_file()
    assert 0.0 <= result.dev_report.macro_f1 <= 1.0


def test_results_independent_of_worker_count(seed_jobs):
    sequential = SeedRunner(seed_jobs(), workers=1).run()
    pooled = SeedRunner(seed_jobs(), workers=2).run()
    assert [r.seed for r in pooled] == [0, 1, 2]
    assert [r.model.params.fingerprint() for r in sequential] == [r.model.params.fingerprint() for r in pooled]
    assert sequential[0].model.params.fingerprint() != sequential[1].model.params.fingerprint()


def test_progress_callback(seed_jobs):
    seen = []
    SeedRunner(seed_jobs(), progress=lambda percent, message: seen.append(percent)).run()
    assert seen == [33, 66, 100]


def test_stop_skips_remaining_jobs(seed_jobs):
    runner = SeedRunner(seed_jobs())

    def stop_after_first(percent, message):
        if percent < 100:
            runner.stop()

    runner.progress = stop_after_first
    results = runner.run()
    assert [r.seed for r in results] == [0]


def test_empty_job_list():
    assert SeedRunner([]).run() == []
