"""
Zentrale Konfiguration (Umgebungsvariablen, optional aus .env)
"""
import os

from dotenv import load_dotenv

load_dotenv()

# === KONFIGURATION ===
# Budgets fuer exakte Suchen: werden sie ueberschritten, wird die Berechnung
# verweigert (BudgetExceededError), nie approximiert.
DEVIATION_BUDGET = int(os.getenv("RSG_DEVIATION_BUDGET", "2000000"))
SEARCH_BUDGET = int(os.getenv("RSG_SEARCH_BUDGET", "1000000"))

# Bis zu dieser Agentenzahl wird ein Pfad per Permutationssuche gefunden
PATH_BRUTE_FORCE_LIMIT = int(os.getenv("RSG_PATH_BRUTE_FORCE_LIMIT", "8"))

# Maximale Anzahl Lastvektoren fuer die exakte alpha-Aufzaehlung
ALPHA_ENUMERATION_LIMIT = int(os.getenv("RSG_ALPHA_ENUMERATION_LIMIT", "200000"))

# Faktor auf die Iterationsgrenze m*|C|*n^2 der Zwei-Ressourcen-Konstruktion
CONSTRUCTION_CAP_FACTOR = int(os.getenv("RSG_CONSTRUCTION_CAP_FACTOR", "1"))

# Reproduktionslauf (reproduce_job.py)
REPRODUCE_SEED = int(os.getenv("RSG_REPRODUCE_SEED", "2024"))
REPRODUCE_SAMPLES = int(os.getenv("RSG_REPRODUCE_SAMPLES", "50"))

# HTTP
DEBUG = os.getenv("DEBUG", "false").lower() == "true"
ALLOWED_ORIGINS = os.getenv("ALLOWED_ORIGINS", "http://localhost:8000").split(",")

# Datenbank fuer gespeicherte Reproduktionslaeufe
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./rsg_equilibria.db")

# Heroku PostgreSQL fix: postgres:// -> postgresql://
if DATABASE_URL.startswith("postgres://"):
    DATABASE_URL = DATABASE_URL.replace("postgres://", "postgresql://", 1)
