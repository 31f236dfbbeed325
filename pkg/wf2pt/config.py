# SPDX-License-Identifier: MIT

import configparser
import json
import logging
import os
from typing import Mapping, Optional, Sequence, Tuple

from wf2pt.petri_net import StateSpaceCaps
from wf2pt.process_tree import Operator
from wf2pt.reduction import DEFAULT_DETECTOR_ORDER
from wf2pt.tree_generator import DEFAULT_OPERATOR_PROBABILITIES, GeneratorConfig, parse_activity_triple, \
    parse_probabilities
from wf2pt.tree_to_net import TranslationVariant

logger = logging.getLogger(__name__)

config_filename = 'wf2pt.ini'

MAX_STATES_ENV_VAR = 'WF2PT_MAX_STATES'


def parse_detector_order(text: str) -> Tuple[Operator, ...]:
    order = tuple(Operator.from_symbol(symbol.strip()) for symbol in text.split(","))
    if sorted(op.value for op in order) != sorted(op.value for op in Operator):
        raise ValueError(f"detector order must list every operator exactly once: {text}")
    return order


class Wf2PtConfig:
    def __init__(self) -> None:
        self.max_states = 1_000_000
        self.max_token_per_place = 8
        self.trace_set_cap = 200_000
        self.default_max_length = 6
        self.strict_and = False
        self.detector_order: Sequence[Operator] = DEFAULT_DETECTOR_ORDER
        self.translation_variant = TranslationVariant.MINIMAL
        self.generator_activities: Tuple[int, int, int] = (10, 20, 30)
        self.generator_probabilities: Mapping[Operator, float] = dict(DEFAULT_OPERATOR_PROBABILITIES)
        self.generator_seed = 0
        self.experiment_workers = 1
        self.snapshot_every = 100
        self.snapshot_compress_state = True
        self.profiling_enabled = False
        self.profiling_report_sec = 30
        self.apply_environment()

    def load(self, config_filename: str) -> None:
        parser = configparser.ConfigParser()
        read_files = parser.read(config_filename)
        if len(read_files) == 0:
            logger.warning(f"config file not found: {config_filename}")

        section_state_space = 'STATE_SPACE'
        section_language = 'LANGUAGE'
        section_reduction = 'REDUCTION'
        section_translation = 'TRANSLATION'
        section_generator = 'GENERATOR'
        section_experiment = 'EXPERIMENT'
        section_profiling = 'PROFILING'

        self.max_states = parser.getint(section_state_space, 'max_states', fallback=self.max_states)
        self.max_token_per_place = parser.getint(section_state_space, 'max_token_per_place',
                                                 fallback=self.max_token_per_place)

        self.trace_set_cap = parser.getint(section_language, 'trace_set_cap', fallback=self.trace_set_cap)
        self.default_max_length = parser.getint(section_language, 'default_max_length',
                                                fallback=self.default_max_length)

        self.strict_and = parser.getboolean(section_reduction, 'strict_and', fallback=self.strict_and)
        detector_order_str = parser.get(section_reduction, 'detector_order', fallback=None)
        if detector_order_str is not None:
            self.detector_order = parse_detector_order(detector_order_str)

        variant_str = parser.get(section_translation, 'variant', fallback=self.translation_variant.value)
        self.translation_variant = TranslationVariant.parse(variant_str)

        activities_str = parser.get(section_generator, 'activities', fallback=None)
        if activities_str is not None:
            self.generator_activities = parse_activity_triple(activities_str)
        probabilities_str = parser.get(section_generator, 'probabilities', fallback=None)
        if probabilities_str is not None:
            self.generator_probabilities = parse_probabilities(json.loads(probabilities_str))
        self.generator_seed = parser.getint(section_generator, 'seed', fallback=self.generator_seed)

        self.experiment_workers = parser.getint(section_experiment, 'workers', fallback=self.experiment_workers)
        self.snapshot_every = parser.getint(section_experiment, 'snapshot_every', fallback=self.snapshot_every)
        self.snapshot_compress_state = parser.getboolean(section_experiment, 'compress_state',
                                                         fallback=self.snapshot_compress_state)

        self.profiling_enabled = parser.getboolean(section_profiling, 'enabled', fallback=self.profiling_enabled)
        self.profiling_report_sec = parser.getint(section_profiling, 'report_sec',
                                                  fallback=self.profiling_report_sec)

        self.apply_environment()

    def apply_environment(self) -> None:
        max_states_str: Optional[str] = os.environ.get(MAX_STATES_ENV_VAR)
        if max_states_str:
            self.max_states = int(max_states_str)
            logger.info(f"max_states set to {self.max_states} from {MAX_STATES_ENV_VAR}")

    def state_space_caps(self) -> StateSpaceCaps:
        return StateSpaceCaps(self.max_states, self.max_token_per_place)

    def generator_config(self) -> GeneratorConfig:
        low, mode, high = self.generator_activities
        return GeneratorConfig(low, mode, high, self.generator_probabilities, self.generator_seed)
