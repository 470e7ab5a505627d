// App shell: hash-routed views over the gateway — task submission, run list,
// live run timeline with per-step artifact previews, and the routing editor.

import { GatewayClient, GatewayError, GatewayUnreachable } from './api.js'
import { collectParams, fieldModels, type FieldModel } from './forms.js'
import { buildPreview, escapeHtml } from './preview.js'
import { fetchTransport, subscribeRunEvents } from './sse.js'
import { TimelineStore, type StepRow } from './timeline.js'
import type { RunRecord, SkillInfo } from './types.js'

const app = document.getElementById('app')!
const gatewayBase =
  new URLSearchParams(location.search).get('gateway') ??
  localStorage.getItem('mediaclaw.gateway') ??
  `${location.protocol}//${location.host}`
const client = new GatewayClient(gatewayBase)

function banner(kind: 'error' | 'info', html: string): string {
  return `<div class="banner banner-${kind}">${html}</div>`
}

function errorBanner(error: unknown, retryHash?: string): string {
  if (error instanceof GatewayUnreachable) {
    const retry = retryHash ? `<a href="${retryHash}" onclick="location.reload()">retry</a>` : ''
    return banner('error', `gateway unreachable at ${escapeHtml(gatewayBase)} ${retry}`)
  }
  if (error instanceof GatewayError) {
    return banner('error', `<code>${escapeHtml(error.api.code)}</code> ${escapeHtml(error.api.message)}`)
  }
  return banner('error', escapeHtml(String(error)))
}

function nav(active: string): string {
  const links = [
    ['#/submit', 'submit'],
    ['#/runs', 'runs'],
    ['#/routing', 'routing'],
  ]
  const items = links
    .map(([href, label]) =>
      `<a href="${href}" class="${active === label ? 'active' : ''}">${label}</a>`)
    .join('')
  return `<nav>${items}<span class="gateway">gateway: ${escapeHtml(gatewayBase)}</span></nav>`
}

// --- submit view -----------------------------------------------------------

function fieldHtml(field: FieldModel): string {
  const placeholder = field.defaultValue !== undefined ? String(field.defaultValue) : ''
  const requiredMark = field.required ? ' <b>*</b>' : ''
  let input: string
  if (field.widget === 'select') {
    const options = field.choices
      .map((c) => `<option ${c === placeholder ? 'selected' : ''}>${escapeHtml(c)}</option>`)
      .join('')
    input = `<select name="${field.name}">${options}</select>`
  } else if (field.widget === 'json' || field.widget === 'list') {
    input = `<textarea name="${field.name}" placeholder="${escapeHtml(placeholder)}"></textarea>`
  } else {
    input = `<input name="${field.name}" placeholder="${escapeHtml(placeholder)}">`
  }
  return (
    `<label class="field" data-field="${field.name}">` +
    `<span>${field.name}${requiredMark} <i>${field.type}</i></span>` +
    `${input}<em class="field-error" data-error-for="${field.name}"></em></label>`
  )
}

async function submitView(): Promise<void> {
  let skills: SkillInfo[]
  try {
    skills = await client.skills()
  } catch (error) {
    app.innerHTML = nav('submit') + errorBanner(error, '#/submit')
    return
  }
  const options = skills
    .map((s) => `<option value="${s.name}">${s.name}</option>`)
    .join('')
  app.innerHTML =
    nav('submit') +
    `<h1>run a skill</h1>` +
    `<form id="skill-form">` +
    `<label class="field"><span>skill</span><select id="skill-select">${options}</select></label>` +
    `<div id="fields"></div>` +
    `<button type="submit">run</button>` +
    `<div id="submit-error"></div>` +
    `</form>`

  if (skills.length === 0) {
    app.innerHTML = nav('submit') + banner('error', 'gateway reports no skills')
    return
  }
  const select = document.getElementById('skill-select') as HTMLSelectElement
  const fieldsBox = document.getElementById('fields')!
  let fields: FieldModel[] = []

  const renderFields = () => {
    const skill = skills.find((s) => s.name === select.value) ?? skills[0]
    fields = fieldModels(skill.params)
    fieldsBox.innerHTML =
      `<p class="hint">${escapeHtml(skill.description)}</p>` +
      fields.map(fieldHtml).join('')
  }
  renderFields()
  select.addEventListener('change', renderFields)

  document.getElementById('skill-form')!.addEventListener('submit', async (e) => {
    e.preventDefault()
    const raw: Record<string, string> = {}
    for (const field of fields) {
      const el = document.querySelector<HTMLInputElement>(`[name="${field.name}"]`)
      raw[field.name] = el?.value ?? ''
    }
    document.querySelectorAll('.field-error').forEach((el) => (el.textContent = ''))
    const { params, errors } = collectParams(fields, raw)
    if (errors.length > 0) {
      for (const err of errors) {
        const slot = document.querySelector(`[data-error-for="${err.field}"]`)
        if (slot) slot.textContent = err.message
      }
      return
    }
    try {
      const runId = await client.runSkill(select.value, params)
      location.hash = `#/run/${runId}`
    } catch (error) {
      document.getElementById('submit-error')!.innerHTML = errorBanner(error)
    }
  })
}

// --- runs list ---------------------------------------------------------------

async function runsView(): Promise<void> {
  let runs: RunRecord[]
  try {
    runs = await client.runs()
  } catch (error) {
    app.innerHTML = nav('runs') + errorBanner(error, '#/runs')
    return
  }
  const rows = runs
    .slice()
    .reverse()
    .map(
      (r) =>
        `<tr class="state-${r.state}"><td><a href="#/run/${r.run_id}">${r.run_id.slice(0, 12)}</a></td>` +
        `<td>${escapeHtml(r.skill_name)}</td><td>${r.state}</td>` +
        `<td>${escapeHtml(r.started_at)}</td></tr>`,
    )
    .join('')
  app.innerHTML =
    nav('runs') +
    `<h1>runs</h1><table class="runs"><thead><tr><th>run</th><th>skill</th>` +
    `<th>state</th><th>started</th></tr></thead><tbody>${rows}</tbody></table>`
}

// --- run timeline ------------------------------------------------------------

function stepRowHtml(row: StepRow, failureFrontier: number | null): string {
  const frontier = row.index === failureFrontier ? ' failure-frontier' : ''
  const retries = row.retries > 0 ? ` · retried ×${row.retries}` : ''
  const error = row.errorCode
    ? ` <code class="error-code">${escapeHtml(row.errorCode)}</code>`
    : ''
  return (
    `<section class="step state-${row.state}${frontier}" data-step="${row.index}">` +
    `<header><b>${escapeHtml(row.name)}</b> <span class="state">${row.state}</span>` +
    `<span class="attempts">attempts: ${row.attempts}${retries}</span>${error}</header>` +
    `<div class="artifacts" data-artifact-count="${row.artifacts.length}"></div>` +
    `</section>`
  )
}

async function runView(runId: string): Promise<void> {
  app.innerHTML = nav('runs') + `<h1>run ${runId.slice(0, 12)}</h1>` +
    `<div id="run-banner"></div><div id="run-meta"></div><div id="timeline"></div>` +
    `<div id="finals"></div>`
  const timelineBox = document.getElementById('timeline')!
  const bannerBox = document.getElementById('run-banner')!
  const store = new TimelineStore(runId)
  const rendered = new Set<string>() // step:artifact pairs already injected

  const redraw = () => {
    const state = store.state
    document.getElementById('run-meta')!.innerHTML =
      `<p><b>${escapeHtml(state.skillName)}</b> · <span class="state state-${state.state}">` +
      `${state.state}</span></p>`
    for (const row of state.steps) {
      let section = timelineBox.querySelector(`[data-step="${row.index}"]`)
      const html = stepRowHtml(row, state.failureFrontier)
      if (!section) {
        timelineBox.insertAdjacentHTML('beforeend', html)
        section = timelineBox.querySelector(`[data-step="${row.index}"]`)!
      } else {
        const artifacts = section.querySelector('.artifacts')!
        const replacement = document.createElement('template')
        replacement.innerHTML = html
        replacement.content.querySelector('.artifacts')!.replaceWith(artifacts)
        section.replaceWith(replacement.content)
        section = timelineBox.querySelector(`[data-step="${row.index}"]`)!
      }
      const artifactBox = section.querySelector('.artifacts')!
      for (const artifact of row.artifacts) {
        const key = `${row.index}:${artifact.artifactId}`
        if (rendered.has(key)) continue
        rendered.add(key)
        const slot = document.createElement('div')
        slot.className = 'artifact-slot'
        slot.dataset.artifactId = artifact.artifactId
        slot.innerHTML = `<span class="loading">${artifact.kind}…</span>`
        artifactBox.appendChild(slot)
        client
          .artifactContent(artifact.artifactId)
          .then((manifest) => {
            const preview = buildPreview(artifact.artifactId, manifest)
            slot.innerHTML =
              `<span class="artifact-id">${artifact.artifactId.slice(0, 10)}</span>` +
              preview.html
          })
          .catch((error) => {
            slot.innerHTML = errorBanner(error)
          })
      }
    }
  }

  try {
    const transport = fetchTransport()
    for await (const event of subscribeRunEvents(gatewayBase, runId, transport, {
      onReconnect: (fromSeq) => {
        bannerBox.innerHTML = banner('info', `reconnected, resuming from seq ${fromSeq}`)
      },
    })) {
      store.ingest(event)
      redraw()
    }
  } catch (error) {
    if (error instanceof GatewayError && error.api.code === 'UNKNOWN_RUN') {
      app.innerHTML = nav('runs') + banner('error', `no run ${escapeHtml(runId)}`)
      return
    }
    bannerBox.innerHTML = errorBanner(error, `#/run/${runId}`)
    return
  }
  const finals = store.state.finalOutputs
    .map((id) => `<a href="#/artifact/${id}">${id.slice(0, 12)}</a>`)
    .join(' · ')
  document.getElementById('finals')!.innerHTML =
    finals ? `<h2>final outputs</h2><p>${finals}</p>` : ''
}

// --- artifact view -------------------------------------------------------------

async function artifactView(artifactId: string): Promise<void> {
  app.innerHTML = nav('runs') + `<h1>artifact ${artifactId.slice(0, 12)}</h1><div id="box"></div>`
  try {
    const envelope = await client.artifact(artifactId)
    const preview = buildPreview(artifactId, envelope.payload)
    const producedBy =
      envelope.produced_by === 'direct-invoke'
        ? 'direct-invoke'
        : `<a href="#/run/${envelope.produced_by.run_id}">run ${envelope.produced_by.run_id.slice(0, 12)}</a>` +
          ` step ${envelope.produced_by.step_index}`
    const inputs = envelope.inputs
      .map((id) => `<a href="#/artifact/${id}">${id.slice(0, 10)}</a>`)
      .join(' ')
    document.getElementById('box')!.innerHTML =
      `<p>kind: <b>${envelope.kind}</b> · produced by ${producedBy}</p>` +
      (inputs ? `<p>inputs: ${inputs}</p>` : '') +
      preview.html
  } catch (error) {
    document.getElementById('box')!.innerHTML = errorBanner(error)
  }
}

// --- routing editor -------------------------------------------------------------

async function routingView(): Promise<void> {
  app.innerHTML = nav('routing') + `<h1>routing config</h1><div id="box"></div>`
  const box = document.getElementById('box')!
  try {
    const config = await client.routing()
    box.innerHTML =
      `<textarea id="config" rows="24">${escapeHtml(JSON.stringify(config, null, 2))}</textarea>` +
      `<div><button id="validate">validate</button> <button id="apply">apply</button></div>` +
      `<div id="result"></div>`
    const result = document.getElementById('result')!
    const read = () => JSON.parse((document.getElementById('config') as HTMLTextAreaElement).value)
    document.getElementById('validate')!.addEventListener('click', async () => {
      try {
        const { violations } = await client.validateRouting(read())
        result.innerHTML = violations.length
          ? banner('error', violations.map((v) =>
              `<code>${escapeHtml(v.code)}</code> at ${escapeHtml(v.path)}: ${escapeHtml(v.message)}`).join('<br>'))
          : banner('info', 'config is valid')
      } catch (error) {
        result.innerHTML = errorBanner(error)
      }
    })
    document.getElementById('apply')!.addEventListener('click', async () => {
      try {
        const { version } = await client.putRouting(read())
        result.innerHTML = banner('info', `applied version ${version}`)
      } catch (error) {
        result.innerHTML = errorBanner(error)
      }
    })
  } catch (error) {
    box.innerHTML = errorBanner(error, '#/routing')
  }
}

// --- router ----------------------------------------------------------------------

function route(): void {
  const hash = location.hash || '#/submit'
  const run = hash.match(/^#\/run\/(.+)$/)
  const artifact = hash.match(/^#\/artifact\/(.+)$/)
  if (run) void runView(run[1])
  else if (artifact) void artifactView(artifact[1])
  else if (hash === '#/runs') void runsView()
  else if (hash === '#/routing') void routingView()
  else void submitView()
}

window.addEventListener('hashchange', route)
route()
