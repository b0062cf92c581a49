import logging

import psutil

from repscan.config import Config

logger = logging.getLogger(__name__)

# bytes per grid point across the padded FFT work arrays of a convolution
BYTES_PER_POINT = 16 * 8


class SystemMonitor:
    def __init__(self, threads=Config.THREADS):
        self.threads = threads

    def worker_count(self):
        """REPSCAN_THREADS when positive, otherwise the physical core count."""
        if self.threads and self.threads > 0:
            return int(self.threads)
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        return int(cores)

    def check_memory(self, total_points):
        needed = total_points * BYTES_PER_POINT
        available = psutil.virtual_memory().available
        if needed > available:
            logger.warning(
                f"Grid of {total_points} points needs about {needed / 2 ** 20:.0f} MiB, "
                f"{available / 2 ** 20:.0f} MiB available"
            )
            return False
        return True
