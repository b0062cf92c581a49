import json
import logging
import os

import numpy as np
import pandas as pd

from repscan.errors import GridFileError, InvalidGrid
from repscan.models import GridSpec, GriddedDensity, WaveFunction

logger = logging.getLogger(__name__)

GRID_SUFFIX = '.grid.json'


class DataService:
    """Reads and writes grid files and tabular results.

    Grid files are JSON objects with kind, dim, axes and a flat C-order
    values list; wavefunctions also carry hbar and store [re, im] pairs.
    """

    def load_grid(self, path):
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except FileNotFoundError:
            raise GridFileError(f"Grid file not found: {path}")
        except (OSError, json.JSONDecodeError) as e:
            raise GridFileError(f"Cannot read grid file {path}: {e}")
        return self.from_dict(data, source=path)

    def from_dict(self, data, source='<dict>'):
        try:
            kind = data['kind']
            spec = GridSpec.from_dict(data['axes'])
            values = np.asarray(data['values'], dtype=float)
        except InvalidGrid:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise GridFileError(f"Malformed grid file {source}: {e}")
        if int(data.get('dim', spec.dim)) != spec.dim:
            raise GridFileError(f"Grid file {source} declares dim {data['dim']} but has {spec.dim} axes")

        if kind == 'density':
            if values.size != spec.total_points:
                raise GridFileError(f"Grid file {source} has {values.size} values for {spec.total_points} points")
            return GriddedDensity(spec, values.reshape(spec.shape))
        if kind == 'wavefunction':
            if values.shape != (spec.total_points, 2):
                raise GridFileError(f"Wavefunction file {source} needs {spec.total_points} [re, im] pairs")
            amplitude = values[:, 0] + 1j * values[:, 1]
            return WaveFunction(spec, amplitude.reshape(spec.shape), float(data.get('hbar', 1.0)))
        raise GridFileError(f"Unknown grid kind '{kind}' in {source}")

    def save_grid(self, obj, path):
        self.write_json(obj.to_dict(), path)
        logger.info(f"Saved {obj.to_dict()['kind']} grid {obj.spec.shape} to {path}")

    def write_json(self, payload, path=None):
        """Serialise payload; floats keep their shortest round-trip repr. Writes to path or returns text."""
        text = json.dumps(payload, indent=2, sort_keys=False, allow_nan=True) + '\n'
        if path is None:
            return text
        self._ensure_parent(path)
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        return text

    def write_csv(self, frame, path=None):
        """Write frame with 17 significant digits; returns the CSV text when path is None."""
        if not isinstance(frame, pd.DataFrame):
            frame = pd.DataFrame(frame)
        if path is None:
            return frame.to_csv(index=False, float_format='%.17g', lineterminator='\n')
        self._ensure_parent(path)
        frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
        logger.debug(f"Wrote {len(frame)} rows to {path}")

    def read_csv(self, path):
        return pd.read_csv(path, float_precision='round_trip')

    @staticmethod
    def _ensure_parent(path):
        parent = os.path.dirname(os.path.abspath(path))
        if not os.path.exists(parent):
            os.makedirs(parent)


data_service = DataService()
