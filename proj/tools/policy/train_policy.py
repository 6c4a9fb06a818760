#!/usr/bin/env python3
"""PPO training of the end-state policy against `raceduel serve-env` workers.

The actor mean is the deployed network (tanh hidden and output layers), so
the exported file reproduces the deterministic policy exactly. Episodes run
through the line-delimited JSON protocol, one session per worker process.
"""

import argparse
import json
import math
import os
import random
import subprocess
import sys
import time

import numpy as np
import torch
import torch.nn as nn

PROTOCOL = "v1"
STATE_DIM = 12
ACTION_DIM = 4
HIDDEN = 256
LOOKAHEADS = "40,60,80,100,120,140"

NORMS = {
    "track_length": 1500.0,
    "lateral": 7.5,
    "velocity": 85.0,
    "acceleration": 25.0,
    "heading": math.pi / 2,
    "gap": 100.0,
    "relative_velocity": 35.0,
    "relative_lateral": 15.0,
}
BOUNDS = {"lateral": 6.535, "lateral_velocity": 15.0, "lateral_acceleration": 25.0, "v_max": 85.0}


class Worker:
    def __init__(self, binary, stage, max_steps, extra):
        cmd = [binary, "serve-env", "--stage", str(stage), "--sd", LOOKAHEADS,
               "--max-steps", str(max_steps)] + extra
        self.proc = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     text=True, bufsize=1)

    def send(self, msg):
        msg["v"] = PROTOCOL
        self.proc.stdin.write(json.dumps(msg) + "\n")
        self.proc.stdin.flush()

    def recv(self):
        line = self.proc.stdout.readline()
        if not line:
            raise RuntimeError("env worker exited")
        reply = json.loads(line)
        if "error" in reply:
            raise RuntimeError(reply["error"])
        return reply

    def close(self):
        try:
            self.send({"cmd": "close"})
            self.recv()
        except (RuntimeError, BrokenPipeError):
            pass
        self.proc.wait(timeout=5)


class VecEnv:
    def __init__(self, binary, count, stage, max_steps, seed, extra=()):
        self.workers = [Worker(binary, stage, max_steps, list(extra)) for _ in range(count)]
        self.rng = random.Random(seed)
        self.stage = stage

    def reset_one(self, i):
        w = self.workers[i]
        w.send({"cmd": "reset", "stage": self.stage, "seed": self.rng.getrandbits(63)})
        return np.asarray(w.recv()["state"], dtype=np.float32)

    def reset(self):
        return np.stack([self.reset_one(i) for i in range(len(self.workers))])

    def step(self, actions):
        for w, a in zip(self.workers, actions):
            w.send({"cmd": "step", "action": [float(x) for x in a]})
        replies = [w.recv() for w in self.workers]
        states, rewards, dones, statuses = [], [], [], []
        for i, r in enumerate(replies):
            rewards.append(r["reward"])
            dones.append(r["done"])
            statuses.append(r["info"]["status"])
            states.append(self.reset_one(i) if r["done"] else np.asarray(r["state"], dtype=np.float32))
        return np.stack(states), np.asarray(rewards, np.float32), np.asarray(dones), statuses

    def close(self):
        for w in self.workers:
            w.close()


def mlp(out_dim):
    return nn.Sequential(nn.Linear(STATE_DIM, HIDDEN), nn.Tanh(), nn.Linear(HIDDEN, HIDDEN), nn.Tanh(),
                         nn.Linear(HIDDEN, out_dim))


class ActorCritic(nn.Module):
    def __init__(self, init_log_std):
        super().__init__()
        self.actor = mlp(ACTION_DIM)
        self.critic = mlp(1)
        self.log_std = nn.Parameter(torch.full((ACTION_DIM,), init_log_std))
        with torch.no_grad():
            self.actor[-1].weight.mul_(0.01)
            self.actor[-1].bias.zero_()

    def mean(self, x):
        return torch.tanh(self.actor(x))

    def dist(self, x):
        return torch.distributions.Normal(self.mean(x), self.log_std.exp())


def export(model, path, metadata):
    layers = []
    for lin in (model.actor[0], model.actor[2], model.actor[4]):
        layers.append({"w": lin.weight.detach().double().tolist(), "b": lin.bias.detach().double().tolist()})
    doc = {
        "format": "raceduel-policy",
        "architecture": [STATE_DIM, HIDDEN, HIDDEN, ACTION_DIM],
        "activation": "tanh",
        "output_activation": "tanh",
        "layers": layers,
        "norms": NORMS,
        "action_bounds": BOUNDS,
        "metadata": metadata,
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        json.dump(doc, f)
        f.write("\n")
    os.replace(tmp, path)


def collect(env, model, obs, steps, gamma, lam):
    n = len(env.workers)
    buf_obs = np.zeros((steps, n, STATE_DIM), np.float32)
    buf_act = np.zeros((steps, n, ACTION_DIM), np.float32)
    buf_logp = np.zeros((steps, n), np.float32)
    buf_rew = np.zeros((steps, n), np.float32)
    buf_done = np.zeros((steps, n), np.float32)
    buf_val = np.zeros((steps + 1, n), np.float32)
    outcomes = []
    for t in range(steps):
        with torch.no_grad():
            x = torch.from_numpy(obs)
            d = model.dist(x)
            a = d.sample()
            buf_logp[t] = d.log_prob(a).sum(-1).numpy()
            buf_val[t] = model.critic(x).squeeze(-1).numpy()
        buf_obs[t] = obs
        buf_act[t] = a.numpy()
        obs, rew, done, status = env.step(np.clip(a.numpy(), -1.0, 1.0))
        buf_rew[t] = rew
        buf_done[t] = done
        outcomes += [s for s, d_ in zip(status, done) if d_]
    with torch.no_grad():
        buf_val[steps] = model.critic(torch.from_numpy(obs)).squeeze(-1).numpy()
    adv = np.zeros((steps, n), np.float32)
    last = np.zeros(n, np.float32)
    for t in reversed(range(steps)):
        nonterminal = 1.0 - buf_done[t]
        delta = buf_rew[t] + gamma * buf_val[t + 1] * nonterminal - buf_val[t]
        last = delta + gamma * lam * nonterminal * last
        adv[t] = last
    ret = adv + buf_val[:steps]
    flat = lambda a, k: a.reshape(steps * n, *k)
    batch = {
        "obs": flat(buf_obs, (STATE_DIM,)),
        "act": flat(buf_act, (ACTION_DIM,)),
        "logp": flat(buf_logp, ()),
        "adv": flat(adv, ()),
        "ret": flat(ret, ()),
    }
    return obs, batch, outcomes


def update(model, opt, batch, epochs, minibatch, clip):
    data = {k: torch.from_numpy(v) for k, v in batch.items()}
    adv = data["adv"]
    data["adv"] = (adv - adv.mean()) / (adv.std() + 1e-8)
    size = len(adv)
    for _ in range(epochs):
        perm = torch.randperm(size)
        for start in range(0, size, minibatch):
            idx = perm[start:start + minibatch]
            d = model.dist(data["obs"][idx])
            logp = d.log_prob(data["act"][idx]).sum(-1)
            ratio = (logp - data["logp"][idx]).exp()
            a = data["adv"][idx]
            pg = -torch.min(ratio * a, ratio.clamp(1 - clip, 1 + clip) * a).mean()
            vf = (model.critic(data["obs"][idx]).squeeze(-1) - data["ret"][idx]).pow(2).mean()
            loss = pg + 0.5 * vf
            opt.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), 0.5)
            opt.step()


def evaluate(binary, weights, out_dir, variant="rl-sl"):
    res = subprocess.run([binary, "evaluate", "--variant", variant, "--weights", weights,
                          "--out", out_dir], capture_output=True, text=True, check=True)
    rows = [l.split(",") for l in res.stdout.strip().splitlines()[1:]]
    return [(float(r[1]), float(r[2]), float(r[4])) for r in rows]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--binary", default="build/tools/raceduel")
    p.add_argument("--out", default="data/reference_policy.json")
    p.add_argument("--workdir", default="/tmp/raceduel_train")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--envs", type=int, default=16)
    p.add_argument("--rollout", type=int, default=256)
    p.add_argument("--iterations", type=int, default=1500)
    p.add_argument("--stage-iterations", type=int, default=60, help="minimum iterations per stage")
    p.add_argument("--advance-success", type=float, default=0.8)
    p.add_argument("--lr", type=float, default=3e-4)
    p.add_argument("--gamma", type=float, default=0.99)
    p.add_argument("--lam", type=float, default=0.95)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--minibatch", type=int, default=512)
    p.add_argument("--clip", type=float, default=0.2)
    p.add_argument("--init-log-std", type=float, default=-1.0)
    p.add_argument("--max-steps", type=int, default=400)
    p.add_argument("--eval-every", type=int, default=50)
    p.add_argument("--start-stage", type=int, default=1)
    p.add_argument("--resume", default="")
    args = p.parse_args()

    torch.manual_seed(args.seed)
    np.random.seed(args.seed)
    torch.set_num_threads(1)
    os.makedirs(args.workdir, exist_ok=True)

    model = ActorCritic(args.init_log_std)
    if args.resume:
        model.load_state_dict(torch.load(args.resume))
    opt = torch.optim.Adam(model.parameters(), lr=args.lr)

    stage = args.start_stage
    env = VecEnv(args.binary, args.envs, stage, args.max_steps, args.seed)
    obs = env.reset()
    recent = []
    stage_iters = 0
    best = None
    log = open(os.path.join(args.workdir, "train_log.csv"), "a")
    log.write("iteration,stage,episodes,success,collision,infeasible,track_end,std,seconds\n")
    t0 = time.time()
    for it in range(1, args.iterations + 1):
        obs, batch, outcomes = collect(env, model, obs, args.rollout, args.gamma, args.lam)
        update(model, opt, batch, args.epochs, args.minibatch, args.clip)
        recent = (recent + outcomes)[-400:]
        stage_iters += 1
        count = {k: sum(o == k for o in recent) / max(1, len(recent))
                 for k in ("success", "collision", "infeasible", "track_end")}
        std = model.log_std.exp().mean().item()
        log.write(f"{it},{stage},{len(outcomes)},{count['success']:.3f},{count['collision']:.3f},"
                  f"{count['infeasible']:.3f},{count['track_end']:.3f},{std:.3f},{time.time() - t0:.0f}\n")
        log.flush()
        print(f"it {it} stage {stage} succ {count['success']:.2f} coll {count['collision']:.2f} "
              f"inf {count['infeasible']:.2f} end {count['track_end']:.2f} std {std:.3f} "
              f"t {time.time() - t0:.0f}s", flush=True)

        if stage < 6 and stage_iters >= args.stage_iterations and count["success"] >= args.advance_success:
            stage += 1
            stage_iters = 0
            recent = []
            env.stage = stage
            print(f"advancing to stage {stage}", flush=True)

        if stage == 6 and it % args.eval_every == 0:
            path = os.path.join(args.workdir, f"policy_{it}.json")
            export(model, path, {"iteration": it, "seed": args.seed, "stage": stage})
            torch.save(model.state_dict(), os.path.join(args.workdir, f"model_{it}.pt"))
            rows = evaluate(args.binary, path, os.path.join(args.workdir, f"eval_{it}"))
            score = [r[1] for r in rows]
            print("eval", it, " ".join(f"{s:.1f}" for s in score), flush=True)
            margin = min(s - (85.0 if sd == 40 else 95.0) for sd, s, _ in rows)
            if best is None or margin > best[0]:
                best = (margin, it)
                export(model, args.out, {"iteration": it, "seed": args.seed, "stage": stage,
                                         "success": score})
                print(f"saved {args.out} (margin {margin:.1f})", flush=True)
    env.close()


if __name__ == "__main__":
    sys.exit(main())
