import os

from dotenv import load_dotenv

load_dotenv()

basedir = os.path.abspath(os.getcwd())
module_basedir = os.path.abspath(os.path.dirname(__file__))


class Config:
    SECRET_KEY = os.environ.get("SECRET_KEY")

    MODULE_BASE_DIR = module_basedir
    BASE_DIRECTORY = basedir

    RANDOM_SEED = int(os.environ.get("PROCESS_BO_SEED", 0))

    # Gaussian process defaults
    GP_RESTARTS = int(os.environ.get("PROCESS_BO_GP_RESTARTS", 8))
    GP_JITTER = 1e-8
    GP_MAX_JITTER = 1e-2
    VARIANCE_FLOOR = 1e-12

    CANDIDATE_CAP = int(os.environ.get("PROCESS_BO_CANDIDATE_CAP", 20000))
    N_JOBS = int(os.environ.get("PROCESS_BO_N_JOBS", 1))

    SESSION_PATH = os.environ.get("PROCESS_BO_SESSION") or os.path.join(
        BASE_DIRECTORY, "campaign.json"
    )

    LOG_LEVEL = os.environ.get("PROCESS_BO_LOG_LEVEL", "INFO")

    APP_DEBUG = True
    APP_TESTING = False


def set_session_path(path: str) -> None:
    Config.SESSION_PATH = path


def set_log_level(level: str) -> None:
    Config.LOG_LEVEL = level.upper()


def set_n_jobs(n_jobs: int) -> None:
    Config.N_JOBS = n_jobs


def set_debug(debug: bool) -> None:
    Config.APP_DEBUG = debug


def set_testing(testing: bool) -> None:
    Config.APP_TESTING = testing
