"""ecoprobe: a local research probe for sustainable-driving studies.

Turns raw location/motion traces into detected vehicle trips, computes fuel
cost, CO2, and potential eco-driving savings per trip and over goal windows,
and analyzes participant interaction logs (dwell time, paired statistics).
"""

__version__ = "0.1.0"
