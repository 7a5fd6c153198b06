"""
Fehlerklassen der Bibliothek

CLI und API bilden sie auf Exit-Codes bzw. HTTP-Statuscodes ab.
"""


class RsgError(Exception):
    """Basisklasse aller Fehler dieses Pakets"""


class InvalidInstanceError(RsgError, ValueError):
    """Instanz, Koalitionsstruktur oder Zeuge ist fehlerhaft"""


class PreconditionError(RsgError, ValueError):
    """Vorbedingung einer Operation ist verletzt (z.B. nicht laminar, m != 2)"""


class NotNashError(PreconditionError):
    """Allokation ist kein Nash-Gleichgewicht"""


class BudgetExceededError(RsgError):
    """Exakte Suche waere groesser als das erlaubte Budget"""

    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: {size} Faelle ueberschreiten das Budget von {budget}")
        self.what = what
        self.size = size
        self.budget = budget


class ConstructionError(RsgError):
    """Konstruktion hat eine Invariante verletzt oder die Iterationsgrenze erreicht"""


class RefutationError(RsgError):
    """Keine Stufe der Widerlegung hat gegriffen"""


class InconsistentWitnessError(RsgError):
    """Eine Zeugen-Abweichung hat die Nachpruefung nicht bestanden"""
