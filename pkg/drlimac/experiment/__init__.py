from .output import ResultSet, emit_outputs, plot_csv
from .runner import Runner, Surface, SweepPoint, DegradationCurve
from .suites import SUITES, SuiteSettings
