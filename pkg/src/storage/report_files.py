"""
Report File Creator
Writes experiment reports as CSV and JSON, a run metadata sidecar and an
optional log-log plot
"""

import io
import os
import csv
import json
import math
from dataclasses import asdict, is_dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional

import pytz
import plotly.graph_objs as go

from src.experiments.checks import SobolevReport, TransformCheckReport
from src.experiments.kappa import KappaReport
from src.experiments.occupation import OccupationSeries
from src.experiments.rates import RateSeries

REPORT_VERSION = 1


def _clean(value: Any) -> Any:
    """Replace non-finite floats by None so the JSON stays standard"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        return _clean(value.item())
    return value


def result_payload(result: Any) -> Dict[str, Any]:
    """
    Flatten an experiment result into plain JSON types

    Derived verdicts that live in properties are added next to the fields.
    """
    data = asdict(result) if is_dataclass(result) else dict(result)
    if isinstance(result, RateSeries):
        for entry in data['entries']:
            if entry['fooling_bound'] is None:
                del entry['fooling_bound']
            if entry['transformed'] is None:
                del entry['transformed']
                del entry['transformed_stderr']
    elif isinstance(result, KappaReport):
        data['deviation'] = result.deviation
        data['agrees'] = result.agrees
    elif isinstance(result, OccupationSeries):
        data['entries'] = [dict(delta=d, second_moment=m, stderr=e) for d, m, e in result.entries]
        data['exact'] = result.exact
    elif isinstance(result, TransformCheckReport):
        data['consistency']['entries'] = [
            dict(steps=n, mean_abs_diff=m, stderr=e) for n, m, e in result.consistency.entries]
        data['consistency']['decreasing'] = result.consistency.decreasing
        data['passed'] = result.passed
    elif isinstance(result, SobolevReport):
        data['passed'] = result.passed
    return _clean(data)


class ReportFileCreator:
    """Create report files for one experiment run"""

    def __init__(self, out: str, fmt: str = 'both'):
        """
        Initialize the report writer

        Args:
            out: Output path prefix; files are <out>.csv, <out>.json and <out>.meta.json
            fmt: csv, json or both
        """
        self.out = out
        self.fmt = fmt
        directory = os.path.dirname(os.path.abspath(out))
        if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
            raise OSError(f"output directory {directory} is not writable")

    def create_csv_report(self, result: Any) -> bytes:
        """
        Tabulate an experiment result

        Args:
            result: RateSeries, OccupationSeries, KappaReport,
                TransformCheckReport or SobolevReport

        Returns:
            CSV document as bytes
        """
        output = io.StringIO()
        writer = csv.writer(output, lineterminator='\n')

        if isinstance(result, RateSeries):
            header = ['n', 'error', 'stderr', 'reps']
            coupled = result.kind == 'coupling_distance'
            if coupled:
                header += ['fooling_bound', 'transformed', 'transformed_stderr']
            writer.writerow(header)
            for e in result.entries:
                row = [e.n, repr(e.error), repr(e.stderr), e.reps]
                if coupled:
                    row += [repr(e.fooling_bound), _cell(e.transformed), _cell(e.transformed_stderr)]
                writer.writerow(row)
        elif isinstance(result, OccupationSeries):
            writer.writerow(['delta', 'second_moment', 'stderr'])
            for delta, moment, stderr in result.entries:
                writer.writerow([repr(delta), repr(moment), repr(stderr)])
        elif isinstance(result, KappaReport):
            writer.writerow(['z', 'quadrature', 'mc', 'stderr', 'reps'])
            writer.writerow([repr(result.z), repr(result.quadrature_value),
                             repr(result.mc_value), repr(result.mc_stderr), result.reps])
        elif isinstance(result, TransformCheckReport):
            writer.writerow(['steps', 'mean_abs_diff', 'stderr'])
            for steps, mean, stderr in result.consistency.entries:
                writer.writerow([steps, repr(mean), repr(stderr)])
        elif isinstance(result, SobolevReport):
            writer.writerow(['mesh', 'seminorm', 'band_bound'])
            for mesh, value, band in zip(result.study.meshes, result.study.values,
                                         result.study.band_bounds):
                writer.writerow([mesh, repr(value), _cell(band)])
        else:
            raise TypeError(f"no CSV layout for {type(result).__name__}")

        return output.getvalue().encode('utf-8')

    def create_json_report(self, verb: str, config: Dict[str, Any], result: Any) -> bytes:
        """JSON document echoing the resolved config and the full result; keys sorted"""
        document = {
            'version': REPORT_VERSION,
            'verb': verb,
            'config': _clean(config),
            'result': result_payload(result),
        }
        return (json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + '\n').encode('utf-8')

    def create_meta(self, wall_time: float, workers: int) -> bytes:
        """Run metadata that varies between identical runs"""
        meta = {
            'finished_utc': datetime.now(pytz.utc).isoformat(),
            'wall_time_seconds': round(wall_time, 3),
            'workers': workers,
        }
        return (json.dumps(meta, indent=2, sort_keys=True) + '\n').encode('utf-8')

    def create_rate_plot(self, result: Any) -> Optional[go.Figure]:
        """Log-log figure of errors with the fitted line, or None for scalar results"""
        if isinstance(result, RateSeries):
            x = [e.n for e in result.entries]
            y = [e.error for e in result.entries]
            err = [e.stderr for e in result.entries]
            x_title, y_title = "n", "error"
        elif isinstance(result, OccupationSeries):
            x = [d for d, _, _ in result.entries]
            y = [m for _, m, _ in result.entries]
            err = [e for _, _, e in result.entries]
            x_title, y_title = "delta", "second moment"
        else:
            return None

        fig = go.Figure()
        fig.add_trace(go.Scatter(
            x=x, y=y,
            mode='markers',
            name='estimate',
            error_y=dict(type='data', array=[2.0 * e for e in err], visible=True),
            marker=dict(size=8, color='#2563eb'),
        ))
        if result.fitted_slope is not None:
            fitted = [math.exp(result.intercept) * v ** result.fitted_slope for v in x]
            fig.add_trace(go.Scatter(
                x=x, y=fitted,
                mode='lines',
                name=f"slope {result.fitted_slope:.3f} ± {result.slope_stderr:.3f}",
                line=dict(color='#dc2626', dash='dash'),
            ))
        fig.update_layout(
            title=dict(text=f"{y_title} against {x_title}", font=dict(size=16)),
            xaxis_title=x_title,
            yaxis_title=y_title,
            xaxis_type='log',
            yaxis_type='log',
            template="plotly_white",
            margin=dict(l=60, r=30, t=60, b=60),
        )
        return fig

    def write_file(self, suffix: str, content: bytes) -> str:
        """Write content to <out><suffix> and return the path"""
        path = f"{self.out}{suffix}"
        with open(path, 'wb') as handle:
            handle.write(content)
        return path

    def create_all_report_files(self, verb: str, config: Dict[str, Any], result: Any,
                                wall_time: float, workers: int, plot: bool = False) -> List[str]:
        """
        Write every report file for a run

        Args:
            verb: Command that produced the result
            config: Resolved configuration (config.to_dict())
            result: Experiment result
            wall_time: Seconds spent in the experiment
            workers: Worker processes used
            plot: Also write <out>.html

        Returns:
            Paths of the written files
        """
        written = []
        if self.fmt in ('csv', 'both'):
            written.append(self.write_file('.csv', self.create_csv_report(result)))
        if self.fmt in ('json', 'both'):
            written.append(self.write_file('.json', self.create_json_report(verb, config, result)))
        written.append(self.write_file('.meta.json', self.create_meta(wall_time, workers)))
        if plot:
            fig = self.create_rate_plot(result)
            if fig is not None:
                path = f"{self.out}.html"
                fig.write_html(path, include_plotlyjs='cdn')
                written.append(path)
        return written


def _cell(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return ''
    return repr(value)
