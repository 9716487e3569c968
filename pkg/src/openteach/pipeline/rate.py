"""Fixed-rate tick scheduling against absolute deadlines.

Deadlines are start + k/hz, so the long-run mean rate self-corrects instead
of drifting with per-tick sleep error. A hybrid sleep-then-spin wait keeps
per-tick jitter in the tens of microseconds. When a tick body overruns its
period, the next tick runs immediately (never skipped) unless the loop is
more than two periods behind, in which case the schedule re-bases and the
missed ticks are counted.
"""

import logging
import time

log = logging.getLogger(__name__)

_SLEEP_MARGIN = 0.0012  # sleep until this close to the deadline, then spin


class RateLimiter:
    def __init__(self, hz):
        if hz <= 0.0:
            raise ValueError("rate must be > 0")
        self.hz = float(hz)
        self.period = 1.0 / float(hz)
        self.overruns = 0
        self.skipped = 0
        self.ticks = 0
        self.lateness = []  # seconds past each deadline, one per tick
        self._start = None
        self._k = 0

    def wait(self):
        """Block until the next deadline; returns lateness in seconds."""
        now = time.perf_counter()
        if self._start is None:
            self._start = now
            self._k = 0
        self._k += 1
        deadline = self._start + self._k * self.period

        behind = now - deadline
        if behind > 0.0:
            self.overruns += 1
            if behind > 2.0 * self.period:
                missed = int(behind / self.period)
                self.skipped += missed
                self._k += missed
                deadline = self._start + self._k * self.period
                log.warning("tick loop %.1f periods behind; skipped %d ticks",
                            behind / self.period, missed)
        else:
            while True:
                remaining = deadline - time.perf_counter()
                if remaining <= 0.0:
                    break
                if remaining > _SLEEP_MARGIN:
                    time.sleep(remaining - _SLEEP_MARGIN)

        late = time.perf_counter() - deadline
        self.ticks += 1
        self.lateness.append(late)
        return late

    @property
    def elapsed(self):
        return 0.0 if self._start is None else time.perf_counter() - self._start

    def measured_hz(self):
        return self.ticks / self.elapsed if self.elapsed > 0.0 else 0.0
