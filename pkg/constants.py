# --- constants.py ---

# --- Application Info ---
APP_NAME = "emoclass"
APP_VERSION = "0.3.0"

# --- Labels & Data Layout ---
# Canonical order; every schema is this tuple restricted to the labels present.
EMOTION_LABELS = ("anger", "disgust", "fear", "joy", "sadness", "surprise")
MIN_SCHEMA_LABELS = 5
TEXT_COLUMN = "text"
ID_COLUMN = "id"
PASSTHROUGH_COLUMNS = (ID_COLUMN,)  # Allowed by infer_schema, kept as opaque extras
SPLITS = ("train", "dev", "test")
DEFAULT_LANGUAGE = "und"
ENGLISH_LANGUAGE = "eng"  # English releases have no disgust column

# --- Embedders ---
EMBEDDER_BACKENDS = ("hashing", "precomputed", "remote")
DEFAULT_HASH_DIM = 256
DEFAULT_ENCODER_DIM = 1024
DEFAULT_MAX_TOKENS = 150
DEFAULT_HASH_SEED = 0
REMOTE_TIMEOUT = 30.0  # Seconds per POST /embed request
REMOTE_BATCH_SIZE = 32
REMOTE_EMBED_PATH = "/embed"
FLOAT_SIG_DIGITS = 9  # Embedding stores and checkpoint weights

# --- Head Training Defaults ---
DEFAULT_LEARNING_RATE = 1e-5
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8
DEFAULT_WEIGHT_DECAY = 0.01
DEFAULT_BATCH_SIZE = 16
DEFAULT_DROPOUT_RATE = 0.3
DEFAULT_SMOOTHING_ALPHA = 0.1
DEFAULT_CLIP_MAX_NORM = 1.0
DEFAULT_PATIENCE = 4
DEFAULT_MAX_EPOCHS = 100
DEFAULT_THRESHOLD = 0.5
DEFAULT_SEED = 0
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
SEED_ENV_VAR = "EMOCLASS_SEED"
CLIP_TOLERANCE = 1e-12  # Relative slack before clipping kicks in
PROB_CLIP = 1e-12  # bce_loss keeps p inside [PROB_CLIP, 1 - PROB_CLIP]

# --- Baselines ---
BASELINE_KINDS = ("logreg", "gnb")
LOGREG_STEP = 0.1
LOGREG_L2_PENALTY = 1e-4
LOGREG_MAX_ITER = 1000
LOGREG_TOL = 1e-8
LOGREG_MIN_STEP = 1e-12  # Backtracking gives up below this step
GNB_VAR_SMOOTHING = 1e-9

# --- Reports ---
REPORT_DECIMALS = 4
MISSING_CELL = "–"
REPORT_FORMATS = ("table", "yaml")
LEADERBOARD_RESOURCE = "resources/leaderboard.yaml"
REFERENCE_TABLE_RESOURCE = "resources/reference_scores.yaml"

# --- Exit Codes ---
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_MISSING_EMBEDDINGS = 4
