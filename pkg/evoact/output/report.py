"""Plain-text reports rendered from jinja2 templates."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

from jinja2 import BaseLoader, Environment, FileSystemLoader, TemplateNotFound

from evoact.analysis.census import SpaceCensus
from evoact.evolve.history import RunSummary, SearchHistory
from evoact.evolve.search import RankedCandidate

logger = logging.getLogger(__name__)

SEARCH_TEMPLATE = """Search report
=============

Evaluations: {{ evaluations }} ({{ accepted }} accepted, {{ discarded }} discarded)
Best search fitness: {{ "%.4f"|format(best.score) }}  {{ best.expr }}
Compute: {{ "%.1f"|format(seconds) }} s

Top functions after reranking ({{ runs }} run(s) each)
{% for r in ranked %}
{{ loop.index }}. {{ r.expr }}
   adjusted fitness {{ "%.4f"|format(r.adjusted_fitness) }} | search fitness {{ "%.4f"|format(r.candidate.score) }} | seq {{ r.candidate.seq }}
{%- endfor %}
"""

CENSUS_TEMPLATE = """Search-space census
===================

nodes  binary  unary  edges  arrangements  source      functions
{% for row in census.rows -%}
{{ "%5d"|format(row.nodes) }}  {{ "%6d"|format(row.binary) }}  {{ "%5d"|format(row.unary) }}  {{ "%5d"|format(row.edges) }}  {{ "%12d"|format(row.arrangements) }}  {{ "%-10s"|format(row.source) }}  {{ row.functions|thousands }}
{% endfor %}
Subtotals by node count
{% for nodes, count in census.subtotals.items() -%}
  {{ nodes }} node(s): {{ count|thousands }}
{% endfor %}
Total: {{ census.total|thousands }}
"""

RUNS_TEMPLATE = """Run comparison
==============
{% for s in summaries %}
{{ s.name }}: {{ s.evaluations }} evaluations, best {{ "%.4f"|format(s.best_fitness) }}, final window average {{ "%.4f"|format(s.final_window_avg) }}
{%- if s.evals_to_reference is not none %}, beat reference after {{ s.evals_to_reference }} evaluations ({{ "%.1f"|format(s.seconds_to_reference) }} s){% endif %}
{%- endfor %}
"""

DEFAULT_TEMPLATES = {
    "search.txt.jinja": SEARCH_TEMPLATE,
    "census.txt.jinja": CENSUS_TEMPLATE,
    "runs.txt.jinja": RUNS_TEMPLATE,
}


def thousands(value: int) -> str:
    return f"{value:,}"


class ReportRenderer:
    """Render text reports, preferring templates found in `template_dir`."""

    def __init__(self, template_dir: Path | None = None):
        self.template_dir = template_dir
        if template_dir and template_dir.exists():
            self.env = Environment(loader=FileSystemLoader(str(template_dir)), autoescape=False)
        else:
            self.env = Environment(loader=BaseLoader(), autoescape=False)
        self.env.filters["thousands"] = thousands

    def _template(self, name: str):
        if self.template_dir is not None:
            try:
                return self.env.get_template(name)
            except TemplateNotFound:
                logger.debug("No %s in %s; using the built-in template", name, self.template_dir)
        return self.env.from_string(DEFAULT_TEMPLATES[name])

    def search(self, history: SearchHistory, ranked: Sequence[RankedCandidate], runs: int) -> str:
        runtime = history.cumulative_runtime()
        return self._template("search.txt.jinja").render(
            evaluations=len(history),
            accepted=history.accepted_count,
            discarded=history.discarded_count,
            best=history.best(),
            seconds=runtime[-1] if runtime else 0.0,
            ranked=ranked,
            runs=runs,
        )

    def census(self, census: SpaceCensus) -> str:
        return self._template("census.txt.jinja").render(census=census)

    def runs(self, summaries: Sequence[RunSummary]) -> str:
        return self._template("runs.txt.jinja").render(summaries=summaries)
