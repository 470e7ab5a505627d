// Media-type auto-detection: every artifact kind maps to exactly one
// renderer, with no per-skill configuration. Unknown payload shapes fall
// back to a JSON tree, never a blank panel.

import type { Manifest, MediaKind } from './types.js'

export type Renderer =
  | 'frame_strip'
  | 'swatch'
  | 'waveform_blocks'
  | 'text_block'
  | 'json_tree'

const RENDERER_BY_KIND: Record<MediaKind, Renderer> = {
  video: 'frame_strip',
  image: 'swatch',
  audio: 'waveform_blocks',
  text: 'text_block',
}

export interface PreviewModel {
  artifactId: string
  kind: string
  renderer: Renderer
  html: string
}

export function rendererFor(kind: string): Renderer {
  return RENDERER_BY_KIND[kind as MediaKind] ?? 'json_tree'
}

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

const rgb = (fill: [number, number, number]) => `rgb(${fill[0]},${fill[1]},${fill[2]})`

function isManifest(payload: unknown): payload is Manifest {
  return (
    typeof payload === 'object' &&
    payload !== null &&
    typeof (payload as Manifest).kind === 'string' &&
    (payload as Manifest).kind in RENDERER_BY_KIND
  )
}

// Video: one swatch cell per frame plus a hover scrubber label. Adjacent
// segment edges having identical colors makes boundary continuity visible.
function frameStrip(manifest: Manifest): string {
  const cells = manifest.frames
    .map((frame) => {
      const subs = frame.overlays
        .filter((o) => o.role === 'subtitle')
        .map((o) => o.text)
        .join(' / ')
      const title = `${frame.t_ms} ms${subs ? ' — ' + subs : ''}`
      return (
        `<span class="frame-cell" data-t-ms="${frame.t_ms}" ` +
        `title="${escapeHtml(title)}" style="background:${rgb(frame.fill_rgb)}"></span>`
      )
    })
    .join('')
  return (
    `<div class="preview frame-strip" data-frames="${manifest.frames.length}">` +
    `<div class="strip-row">${cells}</div>` +
    `<div class="scrubber" aria-hidden="true"></div>` +
    `<span class="strip-label">${manifest.duration_ms} ms · ${manifest.frames.length} frames</span>` +
    `</div>`
  )
}

function swatch(manifest: Manifest): string {
  const frame = manifest.frames[0]
  const fill = frame ? rgb(frame.fill_rgb) : 'transparent'
  const label = frame?.overlays.find((o) => o.role === 'label')?.text ?? ''
  return (
    `<div class="preview swatch">` +
    `<span class="swatch-block" style="background:${fill}"></span>` +
    `<span class="swatch-label">${escapeHtml(label)} ${manifest.width}×${manifest.height}</span>` +
    `</div>`
  )
}

function waveformBlocks(manifest: Manifest): string {
  const total = Math.max(manifest.duration_ms, 1)
  const blocks = manifest.audio
    .map((segment) => {
      const width = ((segment.t1_ms - segment.t0_ms) / total) * 100
      const label = segment.kind === 'silence' ? '·' : segment.text
      return (
        `<span class="audio-block audio-${segment.kind}" style="width:${width.toFixed(2)}%" ` +
        `title="${escapeHtml(`[${segment.t0_ms},${segment.t1_ms}) ${segment.kind}`)}">` +
        `${escapeHtml(label)}</span>`
      )
    })
    .join('')
  return `<div class="preview waveform-blocks" data-segments="${manifest.audio.length}">${blocks}</div>`
}

function textBlock(manifest: Manifest): string {
  return `<div class="preview text-block"><pre>${escapeHtml(manifest.text)}</pre></div>`
}

function jsonNode(value: unknown, key: string): string {
  const name = escapeHtml(key)
  if (value !== null && typeof value === 'object') {
    const entries = Array.isArray(value)
      ? value.map((v, i) => jsonNode(v, String(i)))
      : Object.entries(value).map(([k, v]) => jsonNode(v, k))
    return `<details open><summary>${name}</summary>${entries.join('')}</details>`
  }
  return `<div class="json-leaf"><span>${name}</span>: ${escapeHtml(JSON.stringify(value))}</div>`
}

export function jsonTree(payload: unknown): string {
  return `<div class="preview json-tree">${jsonNode(payload, 'payload')}</div>`
}

export function buildPreview(artifactId: string, payload: unknown): PreviewModel {
  if (!isManifest(payload)) {
    return { artifactId, kind: 'unknown', renderer: 'json_tree', html: jsonTree(payload) }
  }
  const renderer = rendererFor(payload.kind)
  let html: string
  switch (renderer) {
    case 'frame_strip':
      html = frameStrip(payload)
      break
    case 'swatch':
      html = swatch(payload)
      break
    case 'waveform_blocks':
      html = waveformBlocks(payload)
      break
    case 'text_block':
      html = textBlock(payload)
      break
    default:
      html = jsonTree(payload)
  }
  return { artifactId, kind: payload.kind, renderer, html }
}
