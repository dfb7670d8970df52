"""This script is made to streamline the process of setting up a campaign with the process_bo package

It will create a campaign directory that uses the following template
    root
    |- campaign.config.json
    |- initial_data.csv
    |- measurements/

Where the config is one of the synthetic presets (`aps` or `fdm`, given after the directory, `fdm` by default)
that can be edited to describe the real process: its controllable inputs and grid resolution, the constraint windows
on the measured outputs, the cost formula and the batch settings. The CSV file holds the header of the initial
experiments, to be filled in before `campaign init`.
"""

import json
import os
import sys

import pandas as pd

from process_bo.campaign import CampaignConfig, preset_config


def create_config_file(root: str, preset: str) -> dict:
    """Write the preset config, pointing it at the initial data file next to it"""
    document = preset_config(preset)
    document["initial_data"] = "initial_data.csv"
    CampaignConfig.from_dict(document)
    with open(os.path.join(root, "campaign.config.json"), "w+", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
    return document


def create_data_file(root: str, document: dict) -> None:
    config = CampaignConfig.from_dict(document)
    header = [f"x{i + 1}" for i in range(config.n_controllable)]
    if config.has_status:
        header.append("v")
    header += [f"c{k + 1}" for k in range(len(config.constraints))]
    pd.DataFrame(columns=header).to_csv(os.path.join(root, "initial_data.csv"), index=False)


def create_campaign(root: str, preset: str) -> None:
    os.makedirs(os.path.join(root, "measurements"), exist_ok=True)
    document = create_config_file(root, preset)
    create_data_file(root, document)


if __name__ == "__main__":
    args = sys.argv
    create_campaign(args[1], args[2] if len(args) > 2 else "fdm")
