from dotenv import load_dotenv
load_dotenv()  # automatically reads .env (GAME_MINER_THREADS)

__all__ = ["__version__"]
__version__ = "0.1.0"
