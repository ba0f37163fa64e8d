"""Assembly and execution of one simulation run."""
from typing import Dict, List, Union

from src.models.metrics import MetricsReport, RunMetadata
from src.models.scenario import Protocol, RunPoint, TrafficProfile
from src.services.adamac import AdaMacDevice, PanCoordinator
from src.services.baseline import BaselineDevice
from src.services.channel import RadioChannel
from src.services.engine import EventKernel, RngStreams, StreamPurpose
from src.services.metrics import MetricsCollector
from src.services.traffic import TrafficSource, burst_tick_symbols
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'simulation')

Device = Union[AdaMacDevice, BaselineDevice]


class Simulation:
    """One PAN (coordinator plus ``n_devices`` devices) driven by one RunPoint.

    Device short addresses run from 1 to ``n_devices``; the coordinator is 0.
    """

    def __init__(self, point: RunPoint, per_device: bool = False):
        self.point = point
        self.per_device = per_device
        config = point.config
        self.config = config
        self.profile = TrafficProfile.from_scenario(config, point.periodic_interval_s)

        self.kernel = EventKernel()
        self.streams = RngStreams(point.seed)
        self.channel = RadioChannel(self.kernel)
        self.metrics = MetricsCollector(self.profile)
        self.coordinator = PanCoordinator(
            self.kernel, self.channel, config,
            allocation_enabled=config.protocol is Protocol.ADAMAC,
        )

        tick = burst_tick_symbols(self.profile, config.superframe.mini_slot_symbols)
        self.devices: List[Device] = []
        self.sources: List[TrafficSource] = []
        for address in range(1, config.n_devices + 1):
            device = self._build_device(address)
            self.devices.append(device)
            self.sources.append(TrafficSource(device, self.profile, self.streams, self.kernel, tick))

    def _build_device(self, address: int) -> Device:
        args = (address, self.kernel, self.channel, self.metrics, self.config)
        if self.config.protocol is Protocol.ADAMAC:
            return AdaMacDevice(
                *args,
                data_rng=self.streams.stream(address, StreamPurpose.BACKOFF),
                request_rng=self.streams.stream(address, StreamPurpose.BACKOFF_REQUEST),
            )
        return BaselineDevice(*args, rng=self.streams.stream(address, StreamPurpose.BACKOFF))

    @property
    def metadata(self) -> RunMetadata:
        return RunMetadata(
            scenario=self.config.name,
            protocol=self.config.protocol.value,
            p_burst=self.profile.p_burst,
            periodic_interval_s=self.profile.periodic_interval_s,
            seed=self.point.seed,
            duration_s=self.config.run_time_s,
            burst_tick_base=self.profile.burst_tick_base.value,
            periodic_mode=self.profile.periodic_mode.value,
        )

    def radio_on_symbols(self) -> Dict[int, int]:
        return {device.address: device.radio_on_symbols for device in self.devices}

    def run(self) -> MetricsReport:
        """Simulate ``run_time_s`` and summarize; frames still in flight count as lost."""
        t_end = self.config.run_time_symbols
        with sim_logger.log_operation(
            logger, 'run', 'simulation',
            scenario=self.config.name, protocol=self.config.protocol.value,
            periodic_interval_s=self.point.periodic_interval_s, seed=self.point.seed,
        ):
            self.coordinator.start()
            for source in self.sources:
                source.start()
            self.kernel.run_until(t_end)
            self.kernel.advance_to(t_end)
            for device in self.devices:
                device.close()
            pending = self.metrics.finalize()

            stats = self.channel.stats()
            if self.config.protocol is Protocol.ADAMAC and stats.cfp_collisions:
                logger.error(f"{stats.cfp_collisions} collisions inside the CFP", extra={
                    'component': 'simulation',
                    'operation': 'run',
                    'duration_ms': 0,
                    'status': 'schedule_violation'
                })
            sim_logger.log_metric(logger, 'events_processed', self.kernel.processed, 'simulation')
            sim_logger.log_metric(logger, 'pending_at_end', pending, 'simulation')

        return self.metrics.summarize(
            self.metadata,
            channel=stats,
            radio_on_symbols=self.radio_on_symbols() if self.per_device else None,
        )


def run_point(point: RunPoint, per_device: bool = False) -> MetricsReport:
    """Run one job; module-level so worker processes can import it."""
    return Simulation(point, per_device=per_device).run()
